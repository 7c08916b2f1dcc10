#include "gfse/labels.h"

#include <algorithm>
#include <unordered_map>

#include <json.hpp>

#include "gfse/canon.h"

namespace gfse {
namespace {

std::uint32_t pair_bit(std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  return std::uint32_t{1} << (j * (j - 1) / 2 + i);
}

Graph graph_from_mask(std::size_t s, std::uint32_t mask) {
  std::vector<std::pair<NodeId, NodeId>> es;
  for (std::size_t j = 1; j < s; ++j)
    for (std::size_t i = 0; i < j; ++i)
      if (mask & pair_bit(i, j)) es.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
  return from_edge_list(s, es).graph;
}

class Esu {
 public:
  Esu(const Graph& g, const GraphletCatalog& cat, MotifLabel& out)
      : g_(g), cat_(cat), out_(out) {}

  void run() {
    for (NodeId v = 0; v < g_.num_nodes(); ++v) {
      std::vector<NodeId> ext;
      for (NodeId u : g_.neighbors(v))
        if (u > v) ext.push_back(u);
      sub_.assign(1, v);
      extend(ext, v);
    }
  }

 private:
  void record() {
    std::size_t s = sub_.size();
    std::uint32_t mask = 0;
    for (std::size_t j = 1; j < s; ++j)
      for (std::size_t i = 0; i < j; ++i)
        if (g_.has_edge(sub_[i], sub_[j])) mask |= pair_bit(i, j);
    int t = cat_.lookup(s, mask);
    if (t < 0) return;
    for (NodeId v : sub_) ++out_.counts[v * out_.k + static_cast<std::size_t>(t)];
  }

  // ESU: `ext` holds candidates > root adjacent to sub but not in it.
  void extend(std::vector<NodeId> ext, NodeId root) {
    if (sub_.size() >= 3) record();
    if (sub_.size() == cat_.max_size()) return;
    while (!ext.empty()) {
      NodeId w = ext.back();
      ext.pop_back();
      std::vector<NodeId> next = ext;
      for (NodeId u : g_.neighbors(w)) {
        if (u <= root) continue;
        if (std::find(sub_.begin(), sub_.end(), u) != sub_.end()) continue;
        bool touches = false;
        for (NodeId s : sub_)
          if (g_.has_edge(s, u)) {
            touches = true;
            break;
          }
        if (touches) continue;
        if (std::find(next.begin(), next.end(), u) == next.end()) next.push_back(u);
      }
      sub_.push_back(w);
      extend(std::move(next), root);
      sub_.pop_back();
    }
  }

  const Graph& g_;
  const GraphletCatalog& cat_;
  MotifLabel& out_;
  std::vector<NodeId> sub_;
};

}  // namespace

SpdLabel shortest_path_distances(const Graph& g) {
  std::size_t n = g.num_nodes();
  SpdLabel s;
  s.n = n;
  s.dist.resize(n * n);
  for (NodeId v = 0; v < n; ++v) {
    auto d = bfs_distances(g, v);
    std::copy(d.begin(), d.end(), s.dist.begin() + static_cast<std::ptrdiff_t>(v * n));
  }
  s.component_diameter.assign(n, 0);
  bool connected = true;
  for (std::size_t i = 0; i < n; ++i) {
    int ecc = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (s(i, j) == kUnreachable) connected = false;
      else ecc = std::max(ecc, s(i, j));
    }
    s.component_diameter[i] = ecc;
  }
  // Component diameter is the max eccentricity over the component.
  auto comps = connected_components(g);
  std::vector<int> best(comps.count, 0);
  for (std::size_t i = 0; i < n; ++i)
    best[comps.labels[i]] = std::max(best[comps.labels[i]], s.component_diameter[i]);
  for (std::size_t i = 0; i < n; ++i) s.component_diameter[i] = best[comps.labels[i]];
  if (connected) s.diameter = best[0];
  return s;
}

GraphletCatalog GraphletCatalog::build(std::size_t max_size) {
  if (max_size < 3 || max_size > 5)
    throw std::invalid_argument("graphlet catalog max_size must be 3, 4 or 5");
  GraphletCatalog cat;
  cat.max_size_ = max_size;
  std::unordered_map<std::string, int> index;
  for (std::size_t s = 3; s <= max_size; ++s) {
    for (auto& g : enumerate_graphs(s, true).graphs) {
      index[canonical_form(g)] = static_cast<int>(cat.entries_.size());
      cat.forms_.push_back(canonical_form(g));
      cat.entries_.push_back(std::move(g));
    }
  }
  cat.table_.resize(max_size + 1);
  for (std::size_t s = 3; s <= max_size; ++s) {
    std::uint32_t masks = std::uint32_t{1} << (s * (s - 1) / 2);
    cat.table_[s].assign(masks, -1);
    for (std::uint32_t m = 0; m < masks; ++m) {
      auto it = index.find(canonical_form(graph_from_mask(s, m)));
      if (it != index.end()) cat.table_[s][m] = it->second;
    }
  }
  return cat;
}

GraphletCatalog GraphletCatalog::subset(std::span<const std::size_t> keep) const {
  GraphletCatalog out;
  out.max_size_ = max_size_;
  std::vector<int> remap(entries_.size(), -1);
  std::vector<std::size_t> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (std::size_t t : sorted) {
    if (t >= entries_.size()) throw std::out_of_range("graphlet index out of range");
    remap[t] = static_cast<int>(out.entries_.size());
    out.entries_.push_back(entries_[t]);
    out.forms_.push_back(forms_[t]);
  }
  out.table_ = table_;
  for (auto& row : out.table_)
    for (int& v : row)
      if (v >= 0) v = remap[static_cast<std::size_t>(v)];
  return out;
}

MotifLabel count_graphlets(const Graph& g, const GraphletCatalog& catalog) {
  MotifLabel m;
  m.n = g.num_nodes();
  m.k = catalog.size();
  m.counts.assign(m.n * m.k, 0);
  Esu(g, catalog, m).run();
  return m;
}

std::vector<std::uint8_t> community_pair_labels(const CommunityLabel& c) {
  std::size_t n = c.assignment.size();
  std::vector<std::uint8_t> y(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) y[i * n + j] = c.assignment[i] == c.assignment[j];
  return y;
}

StructuralLabels compute_labels(const Graph& g, const GraphletCatalog& catalog,
                                std::uint64_t seed) {
  return {shortest_path_distances(g), count_graphlets(g, catalog), louvain_communities(g, seed)};
}

std::vector<StructuralLabels> compute_labels_batch_serial(const std::vector<Graph>& graphs,
                                                          const GraphletCatalog& catalog,
                                                          std::uint64_t seed) {
  std::vector<StructuralLabels> out;
  out.reserve(graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i)
    out.push_back(compute_labels(graphs[i], catalog, seed + i));
  return out;
}

std::vector<StructuralLabels> compute_labels_batch(const std::vector<Graph>& graphs,
                                                   const GraphletCatalog& catalog,
                                                   std::uint64_t seed) {
  std::vector<StructuralLabels> out(graphs.size());
  auto total = static_cast<std::ptrdiff_t>(graphs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < total; ++i) {
    auto idx = static_cast<std::size_t>(i);
    out[idx] = compute_labels(graphs[idx], catalog, seed + idx);
  }
  return out;
}

std::string labels_json(const StructuralLabels& l) {
  using nlohmann::json;
  json spd = json::array();
  for (std::size_t i = 0; i < l.spd.n; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < l.spd.n; ++j) row.push_back(l.spd(i, j));
    spd.push_back(std::move(row));
  }
  json motif = json::array();
  for (std::size_t i = 0; i < l.motif.n; ++i) {
    json row = json::array();
    for (std::size_t t = 0; t < l.motif.k; ++t) row.push_back(l.motif(i, t));
    motif.push_back(std::move(row));
  }
  json doc{{"spd", std::move(spd)},
           {"diameter", l.spd.diameter.value_or(-1)},
           {"motif", std::move(motif)},
           {"catalog_k", l.motif.k},
           {"community", l.community.assignment},
           {"modularity", l.community.modularity}};
  return doc.dump();
}

}  // namespace gfse
