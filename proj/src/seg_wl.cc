#include "gfse/seg_wl.h"

#include <algorithm>
#include <stdexcept>

#include "gfse/walk_encoding.h"

namespace gfse {
namespace {

std::vector<std::uint32_t> dense_ids(const std::vector<Digest>& colors) {
  auto sorted = colors;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::uint32_t> ids(colors.size());
  for (std::size_t v = 0; v < colors.size(); ++v)
    ids[v] = static_cast<std::uint32_t>(
        std::lower_bound(sorted.begin(), sorted.end(), colors[v]) - sorted.begin());
  return ids;
}

std::size_t count_classes(std::vector<Digest> colors) {
  std::sort(colors.begin(), colors.end());
  return static_cast<std::size_t>(std::unique(colors.begin(), colors.end()) - colors.begin());
}

Digest rational_vector_digest(const RelPse<Rational>& r, std::size_t i, std::size_t j,
                              std::string_view tag) {
  Hasher h;
  h.update(tag);
  for (std::size_t k = 0; k < r.d; ++k) {
    h.update(to_fraction_string(r(i, j, k)));
    h.update(";");
  }
  return h.finish();
}

// One graph's color state under a scheme; colors are content digests.
class Refiner {
 public:
  Refiner(const Graph& g, const EncodingScheme& scheme) : g_(g), kind_(scheme.kind) {
    std::size_t n = g.num_nodes();
    Digest constant = digest_of("node:const");
    color_.assign(n, constant);
    switch (kind_) {
      case SchemeKind::kClassicWl:
        break;
      case SchemeKind::kNeighbor: {
        Digest adj = digest_of("pair:1"), non = digest_of("pair:2");
        pair_.resize(n * n);
        for (NodeId v = 0; v < n; ++v)
          for (NodeId u = 0; u < n; ++u) pair_[v * n + u] = g.has_edge(v, u) ? adj : non;
        break;
      }
      case SchemeKind::kSpd: {
        pair_.resize(n * n);
        std::vector<Digest> by_dist(n);
        for (std::size_t d = 0; d < n; ++d) by_dist[d] = digest_of("spd:" + std::to_string(d));
        Digest inf = digest_of("spd:inf");
        for (NodeId v = 0; v < n; ++v) {
          auto dist = bfs_distances(g, v);
          for (NodeId u = 0; u < n; ++u)
            pair_[v * n + u] = dist[u] < 0 ? inf : by_dist[static_cast<std::size_t>(dist[u])];
        }
        break;
      }
      case SchemeKind::kRw: {
        if (scheme.dim == 0) throw std::invalid_argument("rw scheme needs dim >= 1");
        auto r = relative_rw_encoding_exact(g, scheme.dim);
        pair_.resize(n * n);
        for (NodeId v = 0; v < n; ++v) {
          color_[v] = rational_vector_digest(r, v, v, "node:rw:");
          for (NodeId u = 0; u < n; ++u) pair_[v * n + u] = rational_vector_digest(r, v, u, "pair:rw:");
        }
        break;
      }
    }
  }

  const std::vector<Digest>& colors() const { return color_; }

  void step() {
    std::size_t n = g_.num_nodes();
    std::vector<Digest> next(n);
    if (kind_ == SchemeKind::kClassicWl) {
      std::vector<Digest> nb;
      for (NodeId v = 0; v < n; ++v) {
        nb.clear();
        for (NodeId u : g_.neighbors(v)) nb.push_back(color_[u]);
        std::sort(nb.begin(), nb.end());
        Hasher h;
        h.update("wl").update(color_[v]).update_u64(nb.size());
        for (const auto& c : nb) h.update(c);
        next[v] = h.finish();
      }
    } else {
      std::vector<std::pair<Digest, Digest>> records(n);
      for (NodeId v = 0; v < n; ++v) {
        for (NodeId u = 0; u < n; ++u) records[u] = {color_[u], pair_[v * n + u]};
        std::sort(records.begin(), records.end());
        Hasher h;
        h.update("seg").update_u64(n);
        for (const auto& [c, p] : records) h.update(c).update(p);
        next[v] = h.finish();
      }
    }
    color_ = std::move(next);
  }

 private:
  const Graph& g_;
  SchemeKind kind_;
  std::vector<Digest> pair_;
  std::vector<Digest> color_;
};

std::size_t family_rounds(const std::vector<Graph>& graphs) {
  std::size_t n = 1;
  for (const auto& g : graphs) n = std::max(n, g.num_nodes());
  return comparison_rounds(n, n);
}

}  // namespace

EncodingScheme EncodingScheme::parse(const std::string& name, std::size_t dim) {
  if (name == "wl" || name == "classic-wl") return classic_wl();
  if (name == "neighbor") return neighbor();
  if (name == "spd") return spd();
  if (name == "rw") {
    if (dim == 0) throw std::invalid_argument("rw scheme requires --dim >= 1");
    return rw(dim);
  }
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

std::string EncodingScheme::name() const {
  switch (kind) {
    case SchemeKind::kClassicWl: return "wl";
    case SchemeKind::kNeighbor: return "neighbor";
    case SchemeKind::kSpd: return "spd";
    case SchemeKind::kRw: return "rw";
  }
  return "?";
}

std::size_t ColorState::num_classes(std::size_t round) const {
  const auto& c = colors.at(round);
  if (c.empty()) return 0;
  return *std::max_element(c.begin(), c.end()) + 1;
}

ColorState seg_wl_refine(const Graph& g, const EncodingScheme& scheme) {
  Refiner r(g, scheme);
  ColorState st;
  st.colors.push_back(dense_ids(r.colors()));
  std::size_t classes = count_classes(r.colors());
  for (std::size_t t = 1; t <= g.num_nodes(); ++t) {
    r.step();
    st.colors.push_back(dense_ids(r.colors()));
    st.rounds = t;
    std::size_t next = count_classes(r.colors());
    if (next < classes) throw std::logic_error("color partition coarsened");
    if (next == classes) {
      st.stable = true;
      break;
    }
    classes = next;
  }
  st.final_digests = r.colors();
  return st;
}

ColorState wl_refine(const Graph& g) { return seg_wl_refine(g, EncodingScheme::classic_wl()); }

Digest signature(const Graph& g, const EncodingScheme& scheme, std::size_t rounds) {
  Refiner r(g, scheme);
  for (std::size_t t = 0; t < rounds; ++t) r.step();
  auto hist = r.colors();
  std::sort(hist.begin(), hist.end());
  Hasher h;
  h.update("hist").update_u64(hist.size());
  for (const auto& c : hist) h.update(c);
  return h.finish();
}

bool distinguishable(const Graph& a, const Graph& b, const EncodingScheme& scheme) {
  if (a.num_nodes() != b.num_nodes()) return true;
  auto rounds = comparison_rounds(a.num_nodes(), b.num_nodes());
  return signature(a, scheme, rounds) != signature(b, scheme, rounds);
}

std::vector<Digest> family_signatures_serial(const std::vector<Graph>& graphs,
                                             const EncodingScheme& scheme) {
  auto rounds = family_rounds(graphs);
  std::vector<Digest> out(graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i) out[i] = signature(graphs[i], scheme, rounds);
  return out;
}

std::vector<Digest> family_signatures(const std::vector<Graph>& graphs,
                                      const EncodingScheme& scheme) {
  auto rounds = family_rounds(graphs);
  std::vector<Digest> out(graphs.size());
  auto total = static_cast<std::ptrdiff_t>(graphs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < total; ++i)
    out[static_cast<std::size_t>(i)] =
        signature(graphs[static_cast<std::size_t>(i)], scheme, rounds);
  return out;
}

FamilyReport report_from_signatures(const std::vector<Digest>& sigs) {
  FamilyReport rep;
  rep.graphs = sigs.size();
  rep.pairs = static_cast<std::uint64_t>(sigs.size()) * (sigs.size() ? sigs.size() - 1 : 0) / 2;
  auto sorted = sigs;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    std::uint64_t b = j - i;
    ++rep.buckets[b];
    rep.undistinguished_pairs += b * (b - 1) / 2;
    i = j;
  }
  return rep;
}

FamilyReport family_report(const GraphFamily& fam, const EncodingScheme& scheme) {
  return report_from_signatures(family_signatures(fam.graphs, scheme));
}

std::optional<SrgParams> srg_parameters(const Graph& g) {
  std::size_t n = g.num_nodes();
  std::size_t k = g.degree(0);
  for (NodeId v = 0; v < n; ++v)
    if (g.degree(v) != k) return std::nullopt;
  if (k == 0 || k + 1 == n) return std::nullopt;
  std::optional<std::size_t> lambda, mu;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      auto a = g.neighbors(u), b = g.neighbors(v);
      std::size_t common = 0;
      for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
        if (a[i] == b[j]) {
          ++common, ++i, ++j;
        } else if (a[i] < b[j]) {
          ++i;
        } else {
          ++j;
        }
      }
      auto& slot = g.has_edge(u, v) ? lambda : mu;
      if (!slot) slot = common;
      else if (*slot != common) return std::nullopt;
    }
  }
  return SrgParams{n, k, *lambda, *mu};
}

Graph shrikhande() {
  std::vector<std::pair<NodeId, NodeId>> es;
  const int moves[6][2] = {{1, 0}, {3, 0}, {0, 1}, {0, 3}, {1, 1}, {3, 3}};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (auto& m : moves) {
        int a2 = (a + m[0]) % 4, b2 = (b + m[1]) % 4;
        es.emplace_back(static_cast<NodeId>(4 * a + b), static_cast<NodeId>(4 * a2 + b2));
      }
  return from_edge_list(16, es).graph;
}

Graph rook_4x4() {
  std::vector<std::pair<NodeId, NodeId>> es;
  for (NodeId u = 0; u < 16; ++u)
    for (NodeId v = u + 1; v < 16; ++v)
      if ((u / 4 == v / 4) != (u % 4 == v % 4)) es.emplace_back(u, v);
  return from_edge_list(16, es).graph;
}

}  // namespace gfse
