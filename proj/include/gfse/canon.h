#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gfse/graph.h"

namespace gfse {

inline constexpr std::size_t kCanonicalMaxNodes = 10;
inline constexpr std::size_t kEnumerateMaxNodes = 8;

/// Vertex order realising the canonical form: canonical_order(g)[p] is the
/// node placed at position p.
///
/// Nodes are first split by iterated degree refinement into cells ordered by
/// an isomorphism-invariant key. Within that cell structure the order
/// minimising the upper-triangle adjacency bit string (graph6 column order)
/// is found by branch and bound on bit-string prefixes.
std::vector<NodeId> canonical_order(const Graph& g);

/// graph6 text of the canonically relabelled graph. Equal exactly for
/// isomorphic graphs. Throws for n > 10.
std::string canonical_form(const Graph& g);

Graph canonical_relabel(const Graph& g);

/// One representative per isomorphism class on n nodes, built by vertex
/// augmentation from every (n-1)-node graph and deduplicated on
/// canonical_form. Sorted by canonical form; representatives are
/// canonically labelled. n <= 8.
GraphFamily enumerate_graphs(std::size_t n, bool connected_only);

// Same result computed on one thread; kept as the reference for the
// parallel version.
GraphFamily enumerate_graphs_serial(std::size_t n, bool connected_only);

}  // namespace gfse
