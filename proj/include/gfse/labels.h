#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfse/graph.h"

namespace gfse {

inline constexpr int kUnreachable = -1;

struct SpdLabel {
  std::size_t n = 0;
  std::vector<int> dist;  // n x n, kUnreachable across components
  /// Diameter of the component containing each node.
  std::vector<int> component_diameter;
  /// Whole-graph diameter; nullopt when disconnected.
  std::optional<int> diameter;

  int operator()(std::size_t i, std::size_t j) const { return dist[i * n + j]; }
};

/// All-pairs BFS distances (unweighted shortest paths).
SpdLabel shortest_path_distances(const Graph& g);

/// Connected graphs on 3..max_size nodes, ordered by size then canonical
/// form. For max_size 5 this has 2 + 6 + 21 = 29 entries.
class GraphletCatalog {
 public:
  static GraphletCatalog build(std::size_t max_size = 5);

  std::size_t size() const { return entries_.size(); }
  std::size_t max_size() const { return max_size_; }
  const Graph& entry(std::size_t t) const { return entries_[t]; }
  const std::string& form(std::size_t t) const { return forms_[t]; }

  /// Restricts counting to the given entries (kept in catalog order).
  GraphletCatalog subset(std::span<const std::size_t> keep) const;

  /// Entry index for an induced subgraph on `s` nodes given as an
  /// upper-triangle bitmask (bit j(j-1)/2+i for pair i<j), or -1.
  int lookup(std::size_t s, std::uint32_t mask) const { return table_[s][mask]; }

 private:
  std::size_t max_size_ = 0;
  std::vector<Graph> entries_;
  std::vector<std::string> forms_;
  std::vector<std::vector<int>> table_;  // indexed by subgraph size
};

inline GraphletCatalog build_graphlet_catalog(std::size_t max_size = 5) {
  return GraphletCatalog::build(max_size);
}

struct MotifLabel {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<std::uint64_t> counts;  // n x k

  std::uint64_t operator()(std::size_t i, std::size_t t) const { return counts[i * k + t]; }
};

/// Per-node counts of induced connected subgraphs matching each catalog
/// entry. Each connected vertex subset is visited once (ESU enumeration).
MotifLabel count_graphlets(const Graph& g, const GraphletCatalog& catalog);

class CommunityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommunityLabel {
  std::vector<std::uint32_t> assignment;  // dense ids by first appearance
  std::size_t communities = 0;
  double modularity = 0.0;
  /// Modularity after each aggregation level (whole-graph partitions).
  std::vector<double> level_modularity;
};

/// Two-phase Louvain, run independently on every connected component.
/// Nodes are visited in an order shuffled by `seed`; each node joins the
/// first community of maximal gain.
CommunityLabel louvain_communities(const Graph& g, std::uint64_t seed);

double modularity(const Graph& g, std::span<const std::uint32_t> assignment);

/// n x n, 1 iff same community.
std::vector<std::uint8_t> community_pair_labels(const CommunityLabel& c);

struct StructuralLabels {
  SpdLabel spd;
  MotifLabel motif;
  CommunityLabel community;
};

StructuralLabels compute_labels(const Graph& g, const GraphletCatalog& catalog,
                                std::uint64_t seed);

// Per-graph labels for a corpus. Each graph's labels are computed on one
// thread with seed + index, so both versions agree exactly.
std::vector<StructuralLabels> compute_labels_batch(const std::vector<Graph>& graphs,
                                                   const GraphletCatalog& catalog,
                                                   std::uint64_t seed);
std::vector<StructuralLabels> compute_labels_batch_serial(const std::vector<Graph>& graphs,
                                                          const GraphletCatalog& catalog,
                                                          std::uint64_t seed);

/// {"spd", "diameter", "motif", "catalog_k", "community", "modularity"};
/// unreachable distances and undefined diameters are written as -1.
std::string labels_json(const StructuralLabels& labels);

}  // namespace gfse
