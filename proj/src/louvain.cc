#include <algorithm>
#include <numeric>
#include <random>

#include "gfse/labels.h"
#include "gfse/rng.h"

namespace gfse {
namespace {

// Symmetric weighted adjacency; self[i] is the A_ii entry (twice the weight
// of edges collapsed inside node i).
struct WeightedGraph {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
  std::vector<double> self;
  std::size_t size() const { return adj.size(); }
  double strength(std::size_t i) const {
    double s = self[i];
    for (auto [j, w] : adj[i]) s += w;
    return s;
  }
};

double partition_modularity(const WeightedGraph& g, const std::vector<std::uint32_t>& comm) {
  std::size_t c = *std::max_element(comm.begin(), comm.end()) + 1;
  std::vector<double> in(c, 0.0), tot(c, 0.0);
  double m2 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double k = g.strength(i);
    m2 += k;
    tot[comm[i]] += k;
    in[comm[i]] += g.self[i];
    for (auto [j, w] : g.adj[i])
      if (comm[j] == comm[i]) in[comm[i]] += w;
  }
  if (m2 == 0.0) return 0.0;
  double q = 0.0;
  for (std::size_t x = 0; x < c; ++x) q += in[x] / m2 - (tot[x] / m2) * (tot[x] / m2);
  return q;
}

// Local moving phase; returns true if any node changed community.
bool local_moves(const WeightedGraph& g, std::vector<std::uint32_t>& comm, std::mt19937_64& rng) {
  std::size_t n = g.size();
  std::vector<double> k(n), tot(n, 0.0);
  double m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    k[i] = g.strength(i);
    m2 += k[i];
    tot[comm[i]] += k[i];
  }
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<double> link(n, 0.0);
  std::vector<std::uint32_t> touched;
  bool any = false;
  for (bool moved = true; moved;) {
    moved = false;
    for (std::uint32_t i : order) {
      std::uint32_t own = comm[i];
      touched.clear();
      touched.push_back(own);
      link[own] = 0.0;
      for (auto [j, w] : g.adj[i]) {
        std::uint32_t c = comm[j];
        if (link[c] == 0.0 && std::find(touched.begin(), touched.end(), c) == touched.end()) {
          touched.push_back(c);
        }
        link[c] += w;
      }
      tot[own] -= k[i];
      std::uint32_t best = own;
      double best_gain = link[own] - tot[own] * k[i] / m2;
      for (std::uint32_t c : touched) {
        double gain = link[c] - tot[c] * k[i] / m2;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best = c;
        }
      }
      tot[best] += k[i];
      for (std::uint32_t c : touched) link[c] = 0.0;
      if (best != own) {
        comm[i] = best;
        moved = true;
        any = true;
      }
    }
  }
  return any;
}

std::vector<std::uint32_t> renumber(std::vector<std::uint32_t> comm) {
  std::vector<std::uint32_t> map(comm.size(), static_cast<std::uint32_t>(-1));
  std::uint32_t next = 0;
  for (auto& c : comm) {
    if (map[c] == static_cast<std::uint32_t>(-1)) map[c] = next++;
    c = map[c];
  }
  return comm;
}

WeightedGraph aggregate(const WeightedGraph& g, const std::vector<std::uint32_t>& comm,
                        std::size_t count) {
  WeightedGraph out;
  out.adj.resize(count);
  out.self.assign(count, 0.0);
  std::vector<std::vector<double>> w(count, std::vector<double>(count, 0.0));
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.self[comm[i]] += g.self[i];
    for (auto [j, x] : g.adj[i]) {
      if (comm[j] == comm[i]) out.self[comm[i]] += x;
      else w[comm[i]][comm[j]] += x;
    }
  }
  for (std::uint32_t a = 0; a < count; ++a)
    for (std::uint32_t b = 0; b < count; ++b)
      if (w[a][b] != 0.0) out.adj[a].emplace_back(b, w[a][b]);
  return out;
}

// Louvain on one connected component; returns per-node ids and the
// membership after each level.
std::vector<std::vector<std::uint32_t>> louvain_component(const Graph& g, std::uint64_t seed) {
  std::size_t n = g.num_nodes();
  WeightedGraph wg;
  wg.adj.resize(n);
  wg.self.assign(n, 0.0);
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j : g.neighbors(i)) wg.adj[i].emplace_back(j, 1.0);

  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> node_comm(n);
  std::iota(node_comm.begin(), node_comm.end(), 0u);
  std::vector<std::vector<std::uint32_t>> levels;
  while (true) {
    std::vector<std::uint32_t> comm(wg.size());
    std::iota(comm.begin(), comm.end(), 0u);
    if (!local_moves(wg, comm, rng)) break;
    comm = renumber(std::move(comm));
    std::size_t count = *std::max_element(comm.begin(), comm.end()) + 1;
    for (auto& c : node_comm) c = comm[c];
    levels.push_back(node_comm);
    if (count == wg.size()) break;
    wg = aggregate(wg, comm, count);
  }
  if (levels.empty()) levels.push_back(node_comm);
  return levels;
}

}  // namespace

double modularity(const Graph& g, std::span<const std::uint32_t> assignment) {
  WeightedGraph wg;
  wg.adj.resize(g.num_nodes());
  wg.self.assign(g.num_nodes(), 0.0);
  for (NodeId i = 0; i < g.num_nodes(); ++i)
    for (NodeId j : g.neighbors(i)) wg.adj[i].emplace_back(j, 1.0);
  return partition_modularity(wg, {assignment.begin(), assignment.end()});
}

CommunityLabel louvain_communities(const Graph& g, std::uint64_t seed) {
  if (g.num_edges() == 0) throw CommunityError("Louvain needs at least one edge");
  std::size_t n = g.num_nodes();
  auto comps = connected_components(g);

  std::vector<std::vector<NodeId>> members(comps.count);
  for (NodeId v = 0; v < n; ++v) members[comps.labels[v]].push_back(v);

  std::vector<std::vector<std::vector<std::uint32_t>>> per_comp(comps.count);
  std::size_t depth = 1;
  for (std::size_t c = 0; c < comps.count; ++c) {
    Graph sub = g.induced(members[c]);
    if (sub.num_edges() == 0) {
      per_comp[c] = {{0}};
      continue;
    }
    per_comp[c] = louvain_component(sub, mix_seed(seed, c));
    depth = std::max(depth, per_comp[c].size());
  }

  CommunityLabel out;
  for (std::size_t level = 0; level < depth; ++level) {
    std::vector<std::uint32_t> assign(n);
    std::uint32_t offset = 0;
    for (std::size_t c = 0; c < comps.count; ++c) {
      const auto& lv = per_comp[c][std::min(level, per_comp[c].size() - 1)];
      std::uint32_t local_max = 0;
      for (std::size_t i = 0; i < members[c].size(); ++i) {
        assign[members[c][i]] = offset + lv[i];
        local_max = std::max(local_max, lv[i]);
      }
      offset += local_max + 1;
    }
    assign = renumber(std::move(assign));
    out.level_modularity.push_back(modularity(g, assign));
    out.assignment = std::move(assign);
  }
  out.communities = *std::max_element(out.assignment.begin(), out.assignment.end()) + 1;
  out.modularity = out.level_modularity.back();
  return out;
}

}  // namespace gfse
