#pragma once

#include <optional>
#include <random>

#include "gfse/gradcheck.h"
#include "gfse/labels.h"
#include "gfse/losses.h"
#include "gfse/model.h"

namespace gfse::testing {

/// Two 4-node clusters joined by a bridge; fixed across runs.
inline Graph fixed_graph_8() {
  std::vector<std::pair<NodeId, NodeId>> es{{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {3, 4},
                                            {4, 5}, {5, 6}, {6, 7}, {7, 4}, {5, 7}};
  return from_edge_list(8, es).graph;
}

inline GfseConfig small_config() {
  GfseConfig cfg;
  cfg.d = 4;
  cfg.layers = 2;
  cfg.heads = 2;
  cfg.hidden = 8;
  cfg.out_dim = 6;
  cfg.embed_dim = 4;
  cfg.dtype = "f64";
  return cfg;
}

/// The fixed graph, a relabelled copy sharing its tag and a second-family
/// graph, with labels and deterministic pair samples.
struct FourLossFixture {
  GfseConfig cfg = small_config();
  GfseModel<double> model{cfg, 7};
  std::vector<Graph> graphs;
  std::vector<StructuralLabels> labels;
  std::vector<GraphTensors> tensors;
  std::vector<std::uint32_t> tags{0, 0, 1};
  double margin = 1.0;
  GclOptions gcl{0.1, 16, false};

  FourLossFixture() {
    auto g = fixed_graph_8();
    std::vector<NodeId> perm{3, 0, 6, 1, 7, 2, 5, 4};
    std::vector<std::pair<NodeId, NodeId>> other{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5},
                                                 {5, 0}, {0, 3}, {5, 6}, {6, 7}};
    graphs = {g, g.permuted(perm), from_edge_list(8, other).graph};
    auto cat = build_graphlet_catalog(5);
    for (const auto& h : graphs) {
      labels.push_back(compute_labels(h, cat, 0));
      tensors.push_back(prepare_graph(h, cfg.d));
    }
    auto& s = model.params().at("unc.s").value;
    s = {0.1, -0.2, 0.3, 0.05};
  }

  /// Task losses for parameters bound as `p`; `task` empty means combined.
  ad::Tensor<double> loss(const std::vector<ad::Tensor<double>>& p,
                          std::optional<Task> task) const {
    auto b = model.adopt(p);
    std::mt19937_64 rng(11);
    std::vector<ad::Tensor<double>> spd, mc, cd, z;
    for (std::size_t k = 0; k < graphs.size(); ++k) {
      auto out = model.forward(b, tensors[k]);
      auto pairs = connected_pairs(labels[k].spd);
      spd.push_back(loss_spd(model.spd_head(b, out, pairs.i, pairs.j), spd_targets(labels[k].spd, pairs)));
      mc.push_back(loss_motif(model.motif_head(b, out), labels[k].motif));
      cd.push_back(loss_cd(model.cd_embed(b, out), sample_cd_pairs(labels[k].community, rng), margin));
      z.push_back(model.gcl_embed(b, out));
    }
    auto mean = [](const std::vector<ad::Tensor<double>>& xs) {
      return ad::scale(ad::sum(ad::concat_rows(xs)), 1.0 / static_cast<double>(xs.size()));
    };
    std::array<ad::Tensor<double>, kNumTasks> l{mean(spd), mean(mc), mean(cd),
                                               loss_gcl(ad::concat_rows(z), tags, gcl, rng)};
    if (task) return l[*task];
    return combined_loss(l, b("unc.s"));
  }

  ad::GradcheckReport check(std::optional<Task> task, std::size_t max_entries = SIZE_MAX) {
    ad::GradcheckOptions opt;
    opt.max_entries = max_entries;
    return ad::gradcheck(model.params(), [&](ad::Tape<double>&, const std::vector<ad::Tensor<double>>& p) {
      return loss(p, task);
    }, opt);
  }
};

}  // namespace gfse::testing
