#include <random>

#include <benchmark/benchmark.h>

#include "gfse/canon.h"
#include "gfse/labels.h"
#include "gfse/seg_wl.h"
#include "gfse/walk_encoding.h"

using namespace gfse;

namespace {

const std::vector<Graph>& family7() {
  static const auto graphs = enumerate_graphs(7, true).graphs;
  return graphs;
}

Graph random_connected(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<NodeId, NodeId>> es;
  for (NodeId i = 0; i + 1 < n; ++i) es.emplace_back(i, i + 1);
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 2; j < n; ++j)
      if (coin(rng)) es.emplace_back(i, j);
  return from_edge_list(n, es).graph;
}

const std::vector<Graph>& label_batch() {
  static const auto graphs = [] {
    std::vector<Graph> gs;
    for (std::uint64_t s = 0; s < 32; ++s) gs.push_back(random_connected(24, 0.15, s));
    return gs;
  }();
  return graphs;
}

void BM_FamilySignatures(benchmark::State& state) {
  family7();
  auto scheme = EncodingScheme::rw(8);
  for (auto _ : state) benchmark::DoNotOptimize(family_signatures(family7(), scheme));
}

void BM_FamilySignaturesSerial(benchmark::State& state) {
  family7();
  auto scheme = EncodingScheme::rw(8);
  for (auto _ : state) benchmark::DoNotOptimize(family_signatures_serial(family7(), scheme));
}

void BM_Enumerate(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_graphs(static_cast<std::size_t>(state.range(0)), true));
}

void BM_EnumerateSerial(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(enumerate_graphs_serial(static_cast<std::size_t>(state.range(0)), true));
}

void BM_RelativeWalk(benchmark::State& state) {
  auto g = random_connected(static_cast<std::size_t>(state.range(0)), 0.1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(relative_rw_encoding(g, 8));
}

void BM_RelativeWalkSerial(benchmark::State& state) {
  auto g = random_connected(static_cast<std::size_t>(state.range(0)), 0.1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(relative_rw_encoding_serial(g, 8));
}

void BM_LabelBatch(benchmark::State& state) {
  static const auto cat = build_graphlet_catalog(5);
  for (auto _ : state) benchmark::DoNotOptimize(compute_labels_batch(label_batch(), cat, 0));
}

void BM_LabelBatchSerial(benchmark::State& state) {
  static const auto cat = build_graphlet_catalog(5);
  for (auto _ : state) benchmark::DoNotOptimize(compute_labels_batch_serial(label_batch(), cat, 0));
}

}  // namespace

BENCHMARK(BM_FamilySignatures)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FamilySignaturesSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Enumerate)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnumerateSerial)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RelativeWalk)->Arg(32)->Arg(128)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RelativeWalkSerial)->Arg(32)->Arg(128)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LabelBatch)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LabelBatchSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
