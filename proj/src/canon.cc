#include "gfse/canon.h"

#include <algorithm>
#include <cstdint>

#include "gfse/graph_io.h"

namespace gfse {
namespace {

struct Search {
  std::size_t n = 0;
  std::size_t total_bits = 0;
  std::vector<std::uint16_t> adj;
  std::vector<std::uint32_t> cell;  // required color per position
  std::vector<std::uint32_t> color;
  std::vector<NodeId> order;
  std::vector<NodeId> best_order;
  std::uint64_t best = 0;
  bool have_best = false;
  std::uint16_t used = 0;

  std::uint64_t prefix(std::uint64_t key, std::size_t len) const {
    if (len == 0) return 0;
    return key >> (total_bits - len);
  }

  void run(std::size_t pos, std::uint64_t key, bool tight) {
    if (pos == n) {
      if (!have_best || key < best) {
        best = key;
        best_order = order;
        have_best = true;
      }
      return;
    }
    std::size_t col_start = pos == 0 ? 0 : pos * (pos - 1) / 2;
    std::size_t len = (pos + 1) * pos / 2;
    for (NodeId v = 0; v < n; ++v) {
      if ((used >> v) & 1u || color[v] != cell[pos]) continue;
      std::uint64_t k2 = key;
      for (std::size_t i = 0; i < pos; ++i)
        if ((adj[order[i]] >> v) & 1u)
          k2 |= std::uint64_t{1} << (total_bits - 1 - (col_start + i));
      // Before the first leaf the current path is the future best path.
      bool next_tight = !have_best;
      if (have_best && tight) {
        auto a = prefix(k2, len);
        auto b = prefix(best, len);
        if (a > b) continue;
        next_tight = a == b;
      }
      order[pos] = v;
      used |= static_cast<std::uint16_t>(1u << v);
      run(pos + 1, k2, next_tight);
      used &= static_cast<std::uint16_t>(~(1u << v));
    }
  }
};

// Iterated degree refinement; color ids are ranks of sorted signatures, so
// both the partition and the id order are isomorphism invariant.
std::vector<std::uint32_t> refine_colors(const Graph& g) {
  std::size_t n = g.num_nodes();
  std::vector<std::uint32_t> color(n);
  for (NodeId v = 0; v < n; ++v) color[v] = static_cast<std::uint32_t>(g.degree(v));
  std::size_t classes = 0;
  {
    auto c = color;
    std::sort(c.begin(), c.end());
    classes = static_cast<std::size_t>(std::unique(c.begin(), c.end()) - c.begin());
  }
  while (true) {
    std::vector<std::vector<std::uint32_t>> sig(n);
    for (NodeId v = 0; v < n; ++v) {
      sig[v].push_back(color[v]);
      std::vector<std::uint32_t> nb;
      for (NodeId u : g.neighbors(v)) nb.push_back(color[u]);
      std::sort(nb.begin(), nb.end());
      sig[v].insert(sig[v].end(), nb.begin(), nb.end());
    }
    auto uniq = sig;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (NodeId v = 0; v < n; ++v)
      color[v] = static_cast<std::uint32_t>(
          std::lower_bound(uniq.begin(), uniq.end(), sig[v]) - uniq.begin());
    if (uniq.size() == classes) break;
    classes = uniq.size();
  }
  return color;
}

GraphFamily finish_family(std::vector<std::string> forms, std::size_t n,
                          bool connected_only) {
  std::sort(forms.begin(), forms.end());
  forms.erase(std::unique(forms.begin(), forms.end()), forms.end());
  GraphFamily fam;
  fam.nodes = n;
  fam.description = (connected_only ? "connected, " : "all, ") + std::to_string(n) + " nodes";
  for (const auto& f : forms) {
    Graph g = parse_graph6(f);
    if (connected_only && !connected_components(g).connected) continue;
    fam.graphs.push_back(std::move(g));
  }
  return fam;
}

Graph augment(const Graph& g, std::uint32_t subset) {
  auto es = g.edges();
  auto v = static_cast<NodeId>(g.num_nodes());
  for (NodeId u = 0; u < v; ++u)
    if ((subset >> u) & 1u) es.emplace_back(u, v);
  return from_edge_list(g.num_nodes() + 1, es).graph;
}

void check_enumerate(std::size_t n) {
  if (n == 0 || n > kEnumerateMaxNodes)
    throw GraphError("enumerate_graphs supports 1 <= n <= 8, got " + std::to_string(n));
}

template <bool kParallel>
GraphFamily enumerate_impl(std::size_t n, bool connected_only) {
  check_enumerate(n);
  std::vector<Graph> level{Graph()};
  for (std::size_t m = 1; m < n; ++m) {
    std::size_t subsets = std::size_t{1} << m;
    std::vector<std::string> forms(level.size() * subsets);
    auto total = static_cast<std::ptrdiff_t>(forms.size());
#pragma omp parallel for schedule(dynamic, 64) if (kParallel)
    for (std::ptrdiff_t idx = 0; idx < total; ++idx) {
      auto gi = static_cast<std::size_t>(idx) / subsets;
      auto s = static_cast<std::uint32_t>(static_cast<std::size_t>(idx) % subsets);
      forms[static_cast<std::size_t>(idx)] = canonical_form(augment(level[gi], s));
    }
    bool last = m + 1 == n;
    auto fam = finish_family(std::move(forms), m + 1, last && connected_only);
    level = std::move(fam.graphs);
  }
  if (n == 1) return finish_family({canonical_form(Graph())}, 1, connected_only);
  GraphFamily fam;
  fam.nodes = n;
  fam.description = (connected_only ? "connected, " : "all, ") + std::to_string(n) + " nodes";
  fam.graphs = std::move(level);
  return fam;
}

}  // namespace

std::vector<NodeId> canonical_order(const Graph& g) {
  std::size_t n = g.num_nodes();
  if (n > kCanonicalMaxNodes)
    throw GraphError("canonical_form supports n <= 10, got " + std::to_string(n));
  Search s;
  s.n = n;
  s.total_bits = n * (n - 1) / 2;
  s.adj.assign(n, 0);
  for (NodeId v = 0; v < n; ++v)
    for (NodeId u : g.neighbors(v)) s.adj[v] |= static_cast<std::uint16_t>(1u << u);
  s.color = refine_colors(g);
  s.cell = s.color;
  std::sort(s.cell.begin(), s.cell.end());
  s.order.assign(n, 0);
  s.run(0, 0, true);
  return s.best_order;
}

Graph canonical_relabel(const Graph& g) {
  auto order = canonical_order(g);
  std::vector<NodeId> perm(g.num_nodes());
  for (std::size_t p = 0; p < order.size(); ++p) perm[order[p]] = static_cast<NodeId>(p);
  return g.permuted(perm);
}

std::string canonical_form(const Graph& g) { return write_graph6(canonical_relabel(g)); }

GraphFamily enumerate_graphs(std::size_t n, bool connected_only) {
  return enumerate_impl<true>(n, connected_only);
}

GraphFamily enumerate_graphs_serial(std::size_t n, bool connected_only) {
  return enumerate_impl<false>(n, connected_only);
}

}  // namespace gfse
