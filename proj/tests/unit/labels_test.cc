#include <gtest/gtest.h>

#include <functional>
#include <map>
#include <set>

#include <json.hpp>

#include "gfse/canon.h"
#include "gfse/labels.h"
#include "../common/graphs.h"

using namespace gfse;
using namespace gfse::testing;

namespace {

std::vector<int> floyd_warshall(const Graph& g) {
  std::size_t n = g.num_nodes();
  const int inf = 1 << 20;
  std::vector<int> d(n * n, inf);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0;
  for (auto [u, v] : g.edges()) d[u * n + v] = d[v * n + u] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
  for (int& x : d)
    if (x == inf) x = kUnreachable;
  return d;
}

bool induced_connected(const Graph& g, const std::vector<NodeId>& nodes) {
  std::vector<bool> seen(nodes.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    std::size_t a = stack.back();
    stack.pop_back();
    for (std::size_t b = 0; b < nodes.size(); ++b)
      if (!seen[b] && g.has_edge(nodes[a], nodes[b])) {
        seen[b] = true;
        ++count;
        stack.push_back(b);
      }
  }
  return count == nodes.size();
}

std::vector<std::uint64_t> brute_force_graphlets(const Graph& g, const GraphletCatalog& cat) {
  std::size_t n = g.num_nodes();
  std::map<std::string, std::size_t> by_form;
  for (std::size_t t = 0; t < cat.size(); ++t) by_form[cat.form(t)] = t;
  std::vector<std::uint64_t> counts(n * cat.size(), 0);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    int s = __builtin_popcount(mask);
    if (s < 3 || s > static_cast<int>(cat.max_size())) continue;
    std::vector<NodeId> nodes;
    for (NodeId v = 0; v < n; ++v)
      if (mask >> v & 1) nodes.push_back(v);
    if (!induced_connected(g, nodes)) continue;
    auto it = by_form.find(canonical_form(g.induced(nodes)));
    if (it == by_form.end()) continue;
    for (NodeId v : nodes) ++counts[v * cat.size() + it->second];
  }
  return counts;
}

double modularity_oracle(const Graph& g, const std::vector<std::uint32_t>& c) {
  std::size_t n = g.num_nodes();
  double m2 = 2.0 * static_cast<double>(g.num_edges());
  double q = 0.0;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = 0; j < n; ++j)
      if (c[i] == c[j])
        q += (g.has_edge(i, j) ? 1.0 : 0.0) -
             static_cast<double>(g.degree(i) * g.degree(j)) / m2;
  return q / m2;
}

// Restricted growth strings enumerate every set partition once.
void all_partitions(std::size_t n, std::vector<std::uint32_t>& cur, std::uint32_t max_id,
                    const std::function<void(const std::vector<std::uint32_t>&)>& visit) {
  if (cur.size() == n) {
    visit(cur);
    return;
  }
  for (std::uint32_t c = 0; c <= max_id + 1; ++c) {
    if (cur.empty() && c > 0) break;
    cur.push_back(c);
    all_partitions(n, cur, cur.size() == 1 ? 0 : std::max(max_id, c), visit);
    cur.pop_back();
  }
}

bool same_up_to_renaming(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
  return true;
}

}  // namespace

TEST(Spd, Examples) {
  EXPECT_EQ(shortest_path_distances(cycle(4))(0, 2), 2);
  EXPECT_EQ(shortest_path_distances(path(4))(0, 3), 3);
  auto two = shortest_path_distances(copies(path(2), 2));
  EXPECT_EQ(two(0, 2), kUnreachable);
  EXPECT_FALSE(two.diameter.has_value());
  EXPECT_EQ(two.component_diameter, (std::vector<int>{1, 1, 1, 1}));
}

TEST(Spd, MatchesFloydWarshall) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 500; ++t) {
    std::size_t n = 1 + rng() % 10;
    auto g = random_graph(n, std::uniform_real_distribution<double>(0.05, 0.7)(rng), rng);
    auto s = shortest_path_distances(g);
    ASSERT_EQ(s.dist, floyd_warshall(g)) << t;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        EXPECT_EQ(s(i, j), s(j, i));
        if (s(i, j) == kUnreachable) continue;
        for (std::size_t k = 0; k < n; ++k)
          if (s(i, k) != kUnreachable && s(k, j) != kUnreachable)
            EXPECT_LE(s(i, j), s(i, k) + s(k, j));
      }
    auto d = diameter(g);
    ASSERT_EQ(s.diameter.has_value(), d.has_value());
    if (d) EXPECT_EQ(static_cast<std::size_t>(*s.diameter), *d);
  }
}

TEST(Catalog, Sizes) {
  EXPECT_EQ(build_graphlet_catalog(3).size(), 2u);
  EXPECT_EQ(build_graphlet_catalog(4).size(), 8u);
  auto cat = build_graphlet_catalog(5);
  ASSERT_EQ(cat.size(), 29u);
  std::map<std::size_t, std::size_t> per_size;
  std::set<std::string> forms;
  for (std::size_t t = 0; t < cat.size(); ++t) {
    ++per_size[cat.entry(t).num_nodes()];
    forms.insert(canonical_form(cat.entry(t)));
    EXPECT_TRUE(connected_components(cat.entry(t)).connected);
    if (t > 0) {
      auto a = cat.entry(t - 1).num_nodes(), b = cat.entry(t).num_nodes();
      EXPECT_TRUE(a < b || (a == b && cat.form(t - 1) < cat.form(t)));
    }
  }
  EXPECT_EQ(per_size, (std::map<std::size_t, std::size_t>{{3, 2}, {4, 6}, {5, 21}}));
  EXPECT_EQ(forms.size(), 29u);
  EXPECT_THROW(build_graphlet_catalog(6), std::invalid_argument);
  EXPECT_THROW(build_graphlet_catalog(2), std::invalid_argument);
}

TEST(Graphlets, Examples) {
  auto cat = build_graphlet_catalog(5);
  auto index_of = [&](const Graph& g) {
    for (std::size_t t = 0; t < cat.size(); ++t)
      if (cat.form(t) == canonical_form(g)) return t;
    return cat.size();
  };
  auto k4 = count_graphlets(complete(4), cat);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(k4(i, index_of(complete(3))), 3u);
    EXPECT_EQ(k4(i, index_of(path(3))), 0u);
    EXPECT_EQ(k4(i, index_of(complete(4))), 1u);
  }
  auto c5 = count_graphlets(cycle(5), cat);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(c5(i, index_of(path(3))), 3u);
    EXPECT_EQ(c5(i, index_of(path(4))), 4u);
    EXPECT_EQ(c5(i, index_of(cycle(5))), 1u);
    EXPECT_EQ(c5(i, index_of(complete(3))), 0u);
  }
  auto p3 = count_graphlets(path(3), cat);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(p3(i, index_of(path(3))), 1u);
}

TEST(Graphlets, MatchBruteForceOracle) {
  auto cat = build_graphlet_catalog(5);
  std::mt19937_64 rng(33);
  for (int t = 0; t < 150; ++t) {
    std::size_t n = 3 + rng() % 7;
    auto g = random_graph(n, std::uniform_real_distribution<double>(0.2, 0.8)(rng), rng);
    ASSERT_EQ(count_graphlets(g, cat).counts, brute_force_graphlets(g, cat)) << t;
  }
}

TEST(Graphlets, SubsetCatalog) {
  auto cat = build_graphlet_catalog(5);
  std::vector<std::size_t> keep{1, 7, 28};
  auto sub = cat.subset(keep);
  ASSERT_EQ(sub.size(), 3u);
  std::mt19937_64 rng(35);
  auto g = random_graph(9, 0.4, rng);
  auto full = count_graphlets(g, cat);
  auto part = count_graphlets(g, sub);
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t s = 0; s < 3; ++s) EXPECT_EQ(part(i, s), full(i, keep[s]));
}

TEST(Louvain, BarbellMatchesExhaustiveOptimum) {
  auto g = barbell();
  std::size_t visited = 0;
  double best = -1.0;
  std::vector<std::uint32_t> best_part, cur;
  all_partitions(8, cur, 0, [&](const std::vector<std::uint32_t>& p) {
    ++visited;
    double q = modularity_oracle(g, p);
    if (q > best + 1e-12) {
      best = q;
      best_part = p;
    }
  });
  EXPECT_EQ(visited, 4140u);
  EXPECT_TRUE(same_up_to_renaming(best_part, {0, 0, 0, 0, 1, 1, 1, 1}));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto c = louvain_communities(g, seed);
    EXPECT_EQ(c.communities, 2u);
    EXPECT_TRUE(same_up_to_renaming(c.assignment, best_part));
    EXPECT_NEAR(c.modularity, best, 1e-12);
  }
  auto y = community_pair_labels(louvain_communities(g, 0));
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) EXPECT_EQ(y[i * 8 + j], (i < 4) == (j < 4));
}

TEST(Louvain, SmallExamples) {
  auto k5 = louvain_communities(complete(5), 3);
  EXPECT_EQ(k5.communities, 1u);
  EXPECT_EQ(community_pair_labels(k5), std::vector<std::uint8_t>(25, 1));
  auto two = louvain_communities(copies(complete(3), 2), 3);
  EXPECT_EQ(two.communities, 2u);
  EXPECT_TRUE(same_up_to_renaming(two.assignment, {0, 0, 0, 1, 1, 1}));
  EXPECT_THROW(louvain_communities(make(4, {}), 0), CommunityError);
  CommunityLabel singles{{0, 1}, 2, 0.0, {}};
  EXPECT_EQ(community_pair_labels(singles), (std::vector<std::uint8_t>{1, 0, 0, 1}));
}

TEST(Louvain, Properties) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 200; ++t) {
    std::size_t n = 2 + rng() % 40;
    auto g = random_graph(n, std::uniform_real_distribution<double>(0.05, 0.5)(rng), rng);
    if (g.num_edges() == 0) continue;
    auto c = louvain_communities(g, t);
    for (std::size_t l = 1; l < c.level_modularity.size(); ++l)
      EXPECT_GE(c.level_modularity[l], c.level_modularity[l - 1] - 1e-12);
    std::vector<std::uint32_t> one(n, 0);
    EXPECT_GE(c.modularity, modularity_oracle(g, one) - 1e-12);
    EXPECT_NEAR(c.modularity, modularity_oracle(g, c.assignment), 1e-12);
    std::set<std::uint32_t> ids(c.assignment.begin(), c.assignment.end());
    EXPECT_EQ(ids.size(), c.communities);
    EXPECT_EQ(*ids.rbegin() + 1, c.communities);
    auto again = louvain_communities(g, t);
    EXPECT_EQ(again.assignment, c.assignment);
  }
}

TEST(Labels, PermutationConsistent) {
  auto cat = build_graphlet_catalog(5);
  std::mt19937_64 rng(43);
  for (int t = 0; t < 30; ++t) {
    std::size_t n = 3 + rng() % 10;
    auto g = random_connected(n, 0.3, rng);
    auto perm = random_perm(n, rng);
    auto h = g.permuted(perm);
    auto a = compute_labels(g, cat, 1);
    auto b = compute_labels(h, cat, 1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(b.spd(perm[i], perm[j]), a.spd(i, j));
      for (std::size_t k = 0; k < cat.size(); ++k) EXPECT_EQ(b.motif(perm[i], k), a.motif(i, k));
    }
    // Louvain depends on visit order, so only the achieved partition of the
    // permuted graph is checked to be as good as a relabelled one.
    std::vector<std::uint32_t> moved(n);
    for (std::size_t i = 0; i < n; ++i) moved[perm[i]] = a.community.assignment[i];
    EXPECT_NEAR(modularity(h, moved), a.community.modularity, 1e-12);
  }
}

TEST(Labels, BatchParallelMatchesSerial) {
  auto cat = build_graphlet_catalog(5);
  std::mt19937_64 rng(47);
  std::vector<Graph> graphs;
  for (int t = 0; t < 24; ++t) graphs.push_back(random_connected(5 + rng() % 20, 0.2, rng));
  auto a = compute_labels_batch(graphs, cat, 9);
  auto b = compute_labels_batch_serial(graphs, cat, 9);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(labels_json(a[i]), labels_json(b[i]));
}

TEST(Labels, JsonLayout) {
  auto cat = build_graphlet_catalog(3);
  auto l = compute_labels(copies(path(2), 2), cat, 0);
  auto j = nlohmann::json::parse(labels_json(l));
  EXPECT_EQ(j["spd"][0][2], -1);
  EXPECT_EQ(j["diameter"], -1);
  EXPECT_EQ(j["catalog_k"], 2);
  EXPECT_EQ(j["community"].size(), 4u);
}
