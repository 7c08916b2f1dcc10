#include "gfse/corpus.h"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gfse/graph_io.h"
#include "gfse/rng.h"

namespace gfse {
namespace {

using EdgeSet = std::set<std::pair<NodeId, NodeId>>;

void put(EdgeSet& es, NodeId a, NodeId b) {
  if (a == b) return;
  es.insert({std::min(a, b), std::max(a, b)});
}

Graph build(std::size_t n, const EdgeSet& es) {
  std::vector<std::pair<NodeId, NodeId>> v(es.begin(), es.end());
  return from_edge_list(n, v).graph;
}

Graph erdos_renyi(std::size_t n, std::mt19937_64& rng) {
  double deg = std::uniform_real_distribution<double>(3.0, 6.0)(rng);
  double p = std::min(1.0, deg / static_cast<double>(n - 1));
  std::bernoulli_distribution coin(p);
  EdgeSet es;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      if (coin(rng)) put(es, i, j);
  return build(n, es);
}

Graph barabasi_albert(std::size_t n, std::mt19937_64& rng) {
  std::size_t m = std::uniform_int_distribution<std::size_t>(2, 3)(rng);
  EdgeSet es;
  std::vector<NodeId> ends;
  for (NodeId i = 0; i <= m; ++i)
    for (NodeId j = i + 1; j <= m; ++j) {
      put(es, i, j);
      ends.push_back(i);
      ends.push_back(j);
    }
  for (auto v = static_cast<NodeId>(m + 1); v < n; ++v) {
    std::set<NodeId> targets;
    while (targets.size() < m)
      targets.insert(ends[std::uniform_int_distribution<std::size_t>(0, ends.size() - 1)(rng)]);
    for (NodeId t : targets) {
      put(es, v, t);
      ends.push_back(v);
      ends.push_back(t);
    }
  }
  return build(n, es);
}

Graph watts_strogatz(std::size_t n, std::mt19937_64& rng) {
  const std::size_t half = 2;
  double beta = std::uniform_real_distribution<double>(0.1, 0.3)(rng);
  std::bernoulli_distribution rewire(beta);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  EdgeSet es;
  for (NodeId i = 0; i < n; ++i)
    for (std::size_t s = 1; s <= half; ++s) put(es, i, static_cast<NodeId>((i + s) % n));
  for (NodeId i = 0; i < n; ++i)
    for (std::size_t s = 1; s <= half; ++s) {
      auto j = static_cast<NodeId>((i + s) % n);
      if (!rewire(rng)) continue;
      NodeId t = pick(rng);
      if (t == i || es.count({std::min(i, t), std::max(i, t)})) continue;
      es.erase({std::min(i, j), std::max(i, j)});
      put(es, i, t);
    }
  return build(n, es);
}

Graph stochastic_block(std::size_t n, std::mt19937_64& rng) {
  double p_in = std::uniform_real_distribution<double>(0.5, 0.8)(rng);
  double p_out = std::uniform_real_distribution<double>(0.05, 0.1)(rng);
  std::size_t split = n / 2;
  EdgeSet es;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) {
      bool same = (i < split) == (j < split);
      if (std::bernoulli_distribution(same ? p_in : p_out)(rng)) put(es, i, j);
    }
  return build(n, es);
}

}  // namespace

void CorpusSpec::validate() const {
  if (families.size() < 2) throw CorpusError("corpus needs at least 2 families");
  std::set<std::string> seen;
  for (const auto& f : families) {
    if (f != "er" && f != "ba" && f != "ws" && f != "sbm") throw CorpusError("unknown family " + f);
    if (!seen.insert(f).second) throw CorpusError("duplicate family " + f);
  }
  if (graphs_per_family == 0) throw CorpusError("graphs_per_family must be positive");
  if (min_nodes < 6 || min_nodes > max_nodes || max_nodes > 128)
    throw CorpusError("node range must satisfy 6 <= min_nodes <= max_nodes <= 128");
}

Graph generate_graph(const std::string& family, std::size_t n, std::mt19937_64& rng) {
  if (family == "er") return erdos_renyi(n, rng);
  if (family == "ba") return barabasi_albert(n, rng);
  if (family == "ws") return watts_strogatz(n, rng);
  if (family == "sbm") return stochastic_block(n, rng);
  throw CorpusError("unknown family " + family);
}

Graph generate_connected(const std::string& family, std::size_t n, std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    Graph g = generate_graph(family, n, rng);
    if (connected_components(g).connected) return g;
  }
  throw CorpusError("family " + family + " produced no connected graph on " + std::to_string(n) +
                    " nodes in 100 attempts");
}

Corpus generate_corpus(const CorpusSpec& spec) {
  spec.validate();
  Corpus c;
  c.families = spec.families;
  std::size_t total = spec.families.size() * spec.graphs_per_family;
  c.graphs.resize(total);
  auto count = static_cast<std::ptrdiff_t>(total);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    auto idx = static_cast<std::size_t>(k);
    std::size_t f = idx / spec.graphs_per_family;
    std::mt19937_64 rng(mix_seed(spec.seed, idx));
    std::size_t n = std::uniform_int_distribution<std::size_t>(spec.min_nodes, spec.max_nodes)(rng);
    auto& g = c.graphs[idx];
    g.graph = generate_connected(spec.families[f], n, rng);
    g.tag = static_cast<std::uint32_t>(f);
    g.label_seed = mix_seed(spec.seed ^ 0x6c6162656cULL, idx);
  }
  return c;
}

void attach_labels(Corpus& corpus, const GraphletCatalog& catalog) {
  auto count = static_cast<std::ptrdiff_t>(corpus.graphs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    auto& g = corpus.graphs[static_cast<std::size_t>(k)];
    g.labels = compute_labels(g.graph, catalog, g.label_seed);
  }
}

std::string corpus_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& g : corpus.graphs) {
    nlohmann::json edges = nlohmann::json::array();
    for (auto [u, v] : g.graph.edges()) edges.push_back({u, v});
    nlohmann::json line{{"family", corpus.families[g.tag]},
                        {"tag", g.tag},
                        {"label_seed", g.label_seed},
                        {"n", g.graph.num_nodes()},
                        {"edges", std::move(edges)}};
    out += line.dump() + "\n";
  }
  return out;
}

Corpus parse_corpus_jsonl(std::string_view text) {
  Corpus c;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      std::string fam = j.at("family").get<std::string>();
      auto tag = j.at("tag").get<std::uint32_t>();
      if (tag >= c.families.size()) c.families.resize(tag + 1);
      if (c.families[tag].empty()) c.families[tag] = fam;
      else if (c.families[tag] != fam)
        throw CorpusError("tag " + std::to_string(tag) + " used for families " + c.families[tag] + " and " + fam);
      auto es = j.at("edges").get<std::vector<std::pair<NodeId, NodeId>>>();
      CorpusGraph g;
      g.graph = from_edge_list(j.at("n").get<std::size_t>(), es).graph;
      g.tag = tag;
      g.label_seed = j.at("label_seed").get<std::uint64_t>();
      c.graphs.push_back(std::move(g));
    } catch (const nlohmann::json::exception& e) {
      throw CorpusError("corpus line " + std::to_string(lineno) + ": " + e.what());
    } catch (const GraphError& e) {
      throw CorpusError("corpus line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  for (std::size_t t = 0; t < c.families.size(); ++t)
    if (c.families[t].empty()) throw CorpusError("corpus has no graph with tag " + std::to_string(t));
  return c;
}

Corpus read_corpus(const std::filesystem::path& path) {
  return parse_corpus_jsonl(read_text_file(path));
}

}  // namespace gfse
