#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfse/graph.h"
#include "gfse/labels.h"

namespace gfse {

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Synthetic families: "er" (Erdos-Renyi, mean degree 3..6), "ba"
/// (Barabasi-Albert, m in {2, 3}), "ws" (Watts-Strogatz, k = 4, rewiring
/// 0.1..0.3), "sbm" (two blocks, p_in 0.5..0.8, p_out 0.05..0.1).
struct CorpusSpec {
  std::vector<std::string> families{"er", "ba", "ws", "sbm"};
  std::size_t graphs_per_family = 100;
  std::size_t min_nodes = 8;
  std::size_t max_nodes = 32;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One sample of `family` on `n` nodes (may be disconnected).
Graph generate_graph(const std::string& family, std::size_t n, std::mt19937_64& rng);

/// Regenerates until connected; throws CorpusError after 100 attempts.
Graph generate_connected(const std::string& family, std::size_t n, std::mt19937_64& rng);

struct CorpusGraph {
  Graph graph;
  std::uint32_t tag = 0;  // index into Corpus::families
  std::uint64_t label_seed = 0;
  StructuralLabels labels;
};

struct Corpus {
  std::vector<std::string> families;
  std::vector<CorpusGraph> graphs;  // grouped by family, in generation order
};

/// Graphs only; labels are left empty.
Corpus generate_corpus(const CorpusSpec& spec);
/// Fills labels of every graph in parallel.
void attach_labels(Corpus& corpus, const GraphletCatalog& catalog);
inline Corpus make_corpus(const CorpusSpec& spec, const GraphletCatalog& catalog) {
  auto c = generate_corpus(spec);
  attach_labels(c, catalog);
  return c;
}

/// JSON lines: {"family", "tag", "label_seed", "n", "edges"}.
std::string corpus_jsonl(const Corpus& corpus);
Corpus parse_corpus_jsonl(std::string_view text);
Corpus read_corpus(const std::filesystem::path& path);

}  // namespace gfse
