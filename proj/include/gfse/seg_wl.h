#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gfse/digest.h"
#include "gfse/graph.h"

namespace gfse {

enum class SchemeKind { kClassicWl, kNeighbor, kSpd, kRw };

/// Node/pair encodings driving SEG-WL refinement.
///   classic-wl: 1-WL, own color plus the multiset of neighbor colors.
///   neighbor:   constant node encoding; pair token 1 for edges, 2 otherwise.
///   spd:        constant node encoding; pair token is the BFS distance.
///   rw(d):      exact random-walk encodings P_v and R_vu with d steps.
struct EncodingScheme {
  SchemeKind kind = SchemeKind::kClassicWl;
  std::size_t dim = 0;

  static EncodingScheme classic_wl() { return {SchemeKind::kClassicWl, 0}; }
  static EncodingScheme neighbor() { return {SchemeKind::kNeighbor, 0}; }
  static EncodingScheme spd() { return {SchemeKind::kSpd, 0}; }
  static EncodingScheme rw(std::size_t d) { return {SchemeKind::kRw, d}; }

  /// Accepts "wl", "classic-wl", "neighbor", "spd", "rw".
  static EncodingScheme parse(const std::string& name, std::size_t dim);
  std::string name() const;
};

struct ColorState {
  /// colors[t][v]: dense color id of v after round t, numbered by the
  /// sorted order of the underlying content digests.
  std::vector<std::vector<std::uint32_t>> colors;
  std::vector<Digest> final_digests;
  std::size_t rounds = 0;
  bool stable = false;

  std::size_t num_classes(std::size_t round) const;
};

/// Refines until the partition stops splitting (at most n rounds).
ColorState seg_wl_refine(const Graph& g, const EncodingScheme& scheme);
ColorState wl_refine(const Graph& g);

/// Digest of the color histogram after exactly `rounds` rounds. Colors are
/// derived only from content, so digests of different graphs are directly
/// comparable.
Digest signature(const Graph& g, const EncodingScheme& scheme, std::size_t rounds);

/// Rounds after which histogram equality of two graphs with n1 and n2 nodes
/// is final: the joint partition stabilises within n1 + n2 - 1 rounds.
inline std::size_t comparison_rounds(std::size_t n1, std::size_t n2) {
  return n1 + n2 - 1;
}

bool distinguishable(const Graph& a, const Graph& b, const EncodingScheme& scheme);

// Per-graph signatures for a family sharing one comparison horizon. The
// parallel map and the serial reference return identical vectors.
std::vector<Digest> family_signatures(const std::vector<Graph>& graphs,
                                      const EncodingScheme& scheme);
std::vector<Digest> family_signatures_serial(const std::vector<Graph>& graphs,
                                             const EncodingScheme& scheme);

struct FamilyReport {
  std::size_t graphs = 0;
  std::uint64_t pairs = 0;
  std::uint64_t undistinguished_pairs = 0;
  /// bucket size -> number of buckets of that size
  std::map<std::size_t, std::size_t> buckets;
};

FamilyReport family_report(const GraphFamily& fam, const EncodingScheme& scheme);
FamilyReport report_from_signatures(const std::vector<Digest>& sigs);

struct SrgParams {
  std::size_t n = 0, k = 0, lambda = 0, mu = 0;
  friend bool operator==(const SrgParams&, const SrgParams&) = default;
};

/// Parameters if g is strongly regular, nullopt otherwise.
std::optional<SrgParams> srg_parameters(const Graph& g);

/// Cayley graph on Z4 x Z4 with connection set {±(1,0), ±(0,1), ±(1,1)}.
Graph shrikhande();
/// 4x4 cells, adjacent iff same row or same column.
Graph rook_4x4();

}  // namespace gfse
