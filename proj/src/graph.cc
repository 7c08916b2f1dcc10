#include "gfse/graph.h"

#include <algorithm>
#include <deque>
#include <string>

namespace gfse {

Graph::Graph(std::size_t n, std::vector<std::uint32_t> offsets,
             std::vector<NodeId> adjacency)
    : n_(n), offsets_(std::move(offsets)), neighbors_(std::move(adjacency)) {
  if (n_ == 0) throw GraphError("graph must have at least one node");
  if (offsets_.size() != n_ + 1) throw GraphError("offsets must have length n+1");
  if (offsets_.front() != 0 || offsets_.back() != neighbors_.size())
    throw GraphError("offsets do not span the neighbor array");
  if (neighbors_.size() % 2 != 0) throw GraphError("odd adjacency length");
  for (std::size_t v = 0; v < n_; ++v) {
    if (offsets_[v] > offsets_[v + 1]) throw GraphError("offsets not monotone");
    auto nb = neighbors(static_cast<NodeId>(v));
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (nb[i] >= n_) throw GraphError("neighbor index out of range");
      if (nb[i] == v) throw GraphError("self-loop at node " + std::to_string(v));
      if (i > 0 && nb[i - 1] >= nb[i])
        throw GraphError("neighbor list of node " + std::to_string(v) +
                         " is not strictly increasing");
    }
  }
  for (std::size_t v = 0; v < n_; ++v)
    for (NodeId u : neighbors(static_cast<NodeId>(v)))
      if (!has_edge(u, static_cast<NodeId>(v)))
        throw GraphError("asymmetric adjacency between " + std::to_string(v) +
                         " and " + std::to_string(u));
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<std::pair<NodeId, NodeId>> Graph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < n_; ++u)
    for (NodeId v : neighbors(u))
      if (u < v) out.emplace_back(u, v);
  return out;
}

Graph Graph::permuted(std::span<const NodeId> perm) const {
  if (perm.size() != n_) throw GraphError("permutation size mismatch");
  std::vector<std::pair<NodeId, NodeId>> es;
  es.reserve(num_edges());
  for (auto [u, v] : edges()) es.emplace_back(perm[u], perm[v]);
  auto r = from_edge_list(n_, es);
  if (r.duplicates != 0) throw GraphError("not a permutation");
  return std::move(r.graph);
}

Graph Graph::induced(std::span<const NodeId> nodes) const {
  std::vector<std::pair<NodeId, NodeId>> es;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      if (has_edge(nodes[i], nodes[j]))
        es.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
  return from_edge_list(nodes.size(), es).graph;
}

EdgeListResult from_edge_list(std::size_t n,
                              std::span<const std::pair<NodeId, NodeId>> edges) {
  if (n == 0) throw GraphError("graph must have at least one node");
  std::vector<std::pair<NodeId, NodeId>> dir;
  dir.reserve(edges.size() * 2);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n)
      throw GraphError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                       ") out of range for n=" + std::to_string(n));
    if (u == v) throw GraphError("self-loop at node " + std::to_string(u));
    dir.emplace_back(u, v);
    dir.emplace_back(v, u);
  }
  std::sort(dir.begin(), dir.end());
  auto last = std::unique(dir.begin(), dir.end());
  std::size_t removed = static_cast<std::size_t>(dir.end() - last);
  dir.erase(last, dir.end());

  std::vector<std::uint32_t> offsets(n + 1, 0);
  std::vector<NodeId> nbrs;
  nbrs.reserve(dir.size());
  for (auto [u, v] : dir) {
    ++offsets[u + 1];
    nbrs.push_back(v);
  }
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  return {Graph(n, std::move(offsets), std::move(nbrs)), removed / 2};
}

std::vector<std::size_t> degrees(const Graph& g) {
  std::vector<std::size_t> d(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) d[v] = g.degree(v);
  return d;
}

std::vector<int> bfs_distances(const Graph& g, NodeId source) {
  std::vector<int> dist(g.num_nodes(), -1);
  std::deque<NodeId> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : g.neighbors(u)) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

Components connected_components(const Graph& g) {
  constexpr auto kUnset = static_cast<std::uint32_t>(-1);
  Components c;
  c.labels.assign(g.num_nodes(), kUnset);
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < g.num_nodes(); ++s) {
    if (c.labels[s] != kUnset) continue;
    auto id = static_cast<std::uint32_t>(c.count++);
    c.labels[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : g.neighbors(u)) {
        if (c.labels[v] == kUnset) {
          c.labels[v] = id;
          stack.push_back(v);
        }
      }
    }
  }
  c.connected = c.count == 1;
  return c;
}

std::optional<std::size_t> diameter(const Graph& g) {
  std::size_t best = 0;
  for (NodeId s = 0; s < g.num_nodes(); ++s) {
    for (int d : bfs_distances(g, s)) {
      if (d < 0) return std::nullopt;
      best = std::max(best, static_cast<std::size_t>(d));
    }
  }
  return best;
}

}  // namespace gfse
