#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gfse {

using NodeId = std::uint32_t;

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Immutable undirected simple graph in compressed adjacency form.
///
/// Every undirected edge is stored twice (once per endpoint) and each
/// neighbor list is strictly increasing.
class Graph {
 public:
  Graph() : Graph(1, {0, 0}, {}) {}

  /// Takes prebuilt CSR arrays and validates every invariant.
  Graph(std::size_t n, std::vector<std::uint32_t> offsets,
        std::vector<NodeId> adjacency);

  std::size_t num_nodes() const { return n_; }
  std::size_t num_edges() const { return neighbors_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  bool has_edge(NodeId u, NodeId v) const;

  const std::vector<std::uint32_t>& offsets() const { return offsets_; }
  const std::vector<NodeId>& adjacency() const { return neighbors_; }

  /// Undirected edges (u, v) with u < v in lexicographic order.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

  /// Relabels nodes: node v of this graph becomes node perm[v].
  Graph permuted(std::span<const NodeId> perm) const;

  /// Induced subgraph on `nodes`; node nodes[i] becomes i.
  Graph induced(std::span<const NodeId> nodes) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::size_t n_;
  std::vector<std::uint32_t> offsets_;
  std::vector<NodeId> neighbors_;
};

struct EdgeListResult {
  Graph graph;
  std::size_t duplicates = 0;
};

/// Builds a graph from an edge list. Duplicate edges (in either orientation)
/// are collapsed and counted; self-loops and out-of-range ids throw.
EdgeListResult from_edge_list(std::size_t n,
                              std::span<const std::pair<NodeId, NodeId>> edges);

std::vector<std::size_t> degrees(const Graph& g);

struct Components {
  bool connected = true;
  /// Component id per node; components are numbered by their minimum node.
  std::vector<std::uint32_t> labels;
  std::size_t count = 0;
};

Components connected_components(const Graph& g);

/// Maximum BFS distance over connected pairs; nullopt when disconnected.
std::optional<std::size_t> diameter(const Graph& g);

/// BFS distances from `source`; unreachable nodes get -1.
std::vector<int> bfs_distances(const Graph& g, NodeId source);

struct GraphFamily {
  std::vector<Graph> graphs;
  std::string description;
  /// Declared node count, when every member must share it.
  std::optional<std::size_t> nodes;
};

}  // namespace gfse
