#include <gtest/gtest.h>

#include <cmath>

#include "gfse/canon.h"
#include "gfse/losses.h"
#include "../common/graphs.h"

using namespace gfse;
using namespace gfse::testing;

namespace {

std::size_t catalog_index(const GraphletCatalog& cat, const Graph& g) {
  for (std::size_t t = 0; t < cat.size(); ++t)
    if (cat.form(t) == canonical_form(g)) return t;
  throw std::logic_error("not in catalog");
}

ad::Tensor<double> rows(ad::Tape<double>& tape, std::vector<std::vector<double>> r) {
  std::vector<double> v;
  for (auto& x : r) v.insert(v.end(), x.begin(), x.end());
  return tape.constant({r.size(), r[0].size()}, v);
}

double naive_pair_accuracy(const std::vector<std::vector<double>>& z,
                           const std::vector<std::uint32_t>& label, double threshold) {
  std::size_t good = 0, total = 0;
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j) {
      double dot = 0, a = 0, b = 0;
      for (std::size_t c = 0; c < z[i].size(); ++c) {
        dot += z[i][c] * z[j][c];
        a += z[i][c] * z[i][c];
        b += z[j][c] * z[j][c];
      }
      good += ((dot / std::sqrt(a * b) >= threshold) == (label[i] == label[j]));
      ++total;
    }
  return static_cast<double>(good) / static_cast<double>(total);
}

}  // namespace

TEST(SpdLoss, PathOfFourWithZeroPredictor) {
  auto spd = shortest_path_distances(path(4));
  auto pairs = connected_pairs(spd);
  ASSERT_EQ(pairs.size(), 6u);
  auto t = spd_targets(spd, pairs);
  std::vector<double> want{1.0 / 3, 2.0 / 3, 1.0, 1.0 / 3, 2.0 / 3, 1.0 / 3};
  for (std::size_t k = 0; k < 6; ++k) EXPECT_DOUBLE_EQ(t[k], want[k]);
  ad::Tape<double> tape;
  auto l = loss_spd(tape.constant({6, 1}, std::vector<double>(6, 0.0)), t);
  EXPECT_NEAR(l.item(), 20.0 / 54.0, 1e-15);
}

TEST(SpdLoss, PerfectAndEdgeCases) {
  auto spd = shortest_path_distances(path(2));
  auto pairs = connected_pairs(spd);
  ad::Tape<double> tape;
  EXPECT_EQ(loss_spd(tape.constant({1, 1}, {1.0}), spd_targets(spd, pairs)).item(), 0.0);
  EXPECT_THROW(loss_spd(tape.constant({0, 1}, {}), {}), LossError);
  auto split = shortest_path_distances(copies(path(2), 2));
  EXPECT_EQ(connected_pairs(split).size(), 2u);
  EXPECT_THROW(spd_targets(split, PairList{{0}, {2}}), LossError);
}

TEST(SpdLoss, Sampling) {
  std::mt19937_64 rng(1);
  auto spd = shortest_path_distances(cycle(10));
  auto all = sample_spd_pairs(spd, 1000, rng);
  EXPECT_EQ(all.size(), 45u);
  auto some = sample_spd_pairs(spd, 12, rng);
  EXPECT_EQ(some.size(), 12u);
  for (std::size_t k = 0; k < some.size(); ++k) {
    EXPECT_LT(some.i[k], some.j[k]);
    if (k) EXPECT_LT(some.i[k - 1] * 10 + some.j[k - 1], some.i[k] * 10 + some.j[k]);
  }
}

TEST(MotifLoss, CompleteGraphTrianglesOnly) {
  auto full = build_graphlet_catalog(5);
  std::vector<std::size_t> keep{catalog_index(full, complete(3))};
  auto tri = full.subset(keep);
  auto label = count_graphlets(complete(4), tri);
  ad::Tape<double> tape;
  auto l = loss_motif(tape.constant({4, 1}, std::vector<double>(4, 0.0)), label);
  EXPECT_NEAR(l.item(), std::pow(std::log(4.0), 2), 1e-12);
  EXPECT_NEAR(l.item(), 1.922, 1e-3);
  EXPECT_THROW(loss_motif(tape.constant({4, 2}, std::vector<double>(8, 0.0)), label), LossError);
  std::vector<double> perfect(4, std::log1p(3.0));
  EXPECT_NEAR(loss_motif(tape.constant({4, 1}, perfect), label).item(), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(mae_mc(std::vector<double>(4, 0.0), label), 3.0);
  EXPECT_NEAR(mae_mc(perfect, label), 0.0, 1e-12);
}

TEST(CdLoss, PairContributions) {
  ad::Tape<double> tape;
  auto z = rows(tape, {{1, 0}, {1, 0}, {0, 1}});
  CdPairs intra{{{0}, {1}}, {1}};
  CdPairs inter_same_dir{{{0}, {1}}, {0}};
  CdPairs inter_orthogonal{{{0}, {2}}, {0}};
  EXPECT_NEAR(loss_cd(z, intra, 1.0).item(), 0.0, 1e-15);
  EXPECT_NEAR(loss_cd(z, inter_same_dir, 1.0).item(), 1.0, 1e-15);
  EXPECT_NEAR(loss_cd(z, inter_orthogonal, 1.0).item(), 0.0, 1e-15);
  CdPairs mixed{{{0, 0}, {1, 2}}, {0, 1}};
  EXPECT_NEAR(loss_cd(z, mixed, 1.0).item(), (1.0 + 1.0) / 2, 1e-15);
  EXPECT_NEAR(loss_cd(z, inter_same_dir, 0.0).item(), 0.0, 1e-15);
  auto zero = rows(tape, {{0, 0}, {1, 0}});
  EXPECT_THROW(loss_cd(zero, intra, 1.0), ad::NumericError);
}

TEST(CdLoss, PairSampling) {
  std::mt19937_64 rng(2);
  CommunityLabel c{{0, 0, 0, 1, 1, 2}, 3, 0.0, {}};
  auto s = sample_cd_pairs(c, rng);
  std::size_t intra = 0, inter = 0;
  for (std::size_t k = 0; k < s.pairs.size(); ++k) {
    bool same = c.assignment[s.pairs.i[k]] == c.assignment[s.pairs.j[k]];
    EXPECT_EQ(s.same[k], same);
    (same ? intra : inter)++;
  }
  EXPECT_EQ(intra, 4u);
  EXPECT_EQ(inter, 4u);
  CommunityLabel one{{0, 0, 0}, 1, 0.0, {}};
  EXPECT_EQ(sample_cd_pairs(one, rng).pairs.size(), 3u);
}

TEST(GclLoss, NegativesOnlyExamples) {
  ad::Tape<double> tape;
  auto z = rows(tape, {{1, 0}, {1, 0}, {-1, 0}});
  std::vector<std::uint32_t> tags{0, 0, 1};
  std::mt19937_64 rng(3);
  GclOptions neg{0.1, 16, false};
  EXPECT_NEAR(loss_gcl(z, tags, neg, rng).item(), -20.0, 1e-12);
  auto eq = rows(tape, {{1, 0}, {1, 0}, {1, 0}});
  EXPECT_NEAR(loss_gcl(eq, tags, neg, rng).item(), 0.0, 1e-12);
  GclOptions with_pos{0.1, 16, true};
  EXPECT_NEAR(loss_gcl(z, tags, with_pos, rng).item(), std::log1p(std::exp(-20.0)), 1e-15);
  EXPECT_NEAR(loss_gcl(eq, tags, with_pos, rng).item(), std::log(2.0), 1e-12);
}

TEST(GclLoss, TemperatureLimit) {
  ad::Tape<double> tape;
  auto z = rows(tape, {{1, 0.2}, {0.3, 1}, {-1, 0.5}, {0.1, -1}, {0.7, 0.7}});
  std::vector<std::uint32_t> tags{0, 0, 1, 1, 2};
  std::mt19937_64 rng(4);
  EXPECT_NEAR(loss_gcl(z, tags, GclOptions{1e9, 16, false}, rng).item(), std::log(3.0), 1e-6);
  EXPECT_NEAR(loss_gcl(z, tags, GclOptions{1e9, 16, true}, rng).item(), std::log(4.0), 1e-6);
  EXPECT_NEAR(loss_gcl(z, tags, GclOptions{1e9, 2, false}, rng).item(), std::log(2.0), 1e-6);
}

TEST(GclLoss, MatchesDirectFormula) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  std::vector<std::vector<double>> zr(8, std::vector<double>(3));
  for (auto& r : zr)
    for (auto& x : r) x = nd(rng);
  std::vector<std::uint32_t> tags{0, 0, 1, 1, 2, 2, 0, 1};
  ad::Tape<double> tape;
  auto z = rows(tape, zr);
  std::mt19937_64 unused(6);
  double got = loss_gcl(z, tags, GclOptions{0.5, 100, false}, unused).item();
  auto sim = [&](std::size_t a, std::size_t b) {
    double d = 0, x = 0, y = 0;
    for (std::size_t c = 0; c < 3; ++c) {
      d += zr[a][c] * zr[b][c];
      x += zr[a][c] * zr[a][c];
      y += zr[b][c] * zr[b][c];
    }
    return d / std::sqrt(x * y);
  };
  double total = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) {
      if (i == j || tags[i] != tags[j]) continue;
      double den = 0;
      for (std::size_t k = 0; k < 8; ++k)
        if (tags[k] != tags[i]) den += std::exp(sim(i, k) / 0.5);
      total += -sim(i, j) / 0.5 + std::log(den);
      ++count;
    }
  EXPECT_NEAR(got, total / static_cast<double>(count), 1e-12);
}

TEST(GclLoss, NeedsPositiveAndNegative) {
  ad::Tape<double> tape;
  std::mt19937_64 rng(7);
  auto z = rows(tape, {{1, 0}, {0, 1}});
  EXPECT_THROW(loss_gcl(z, {0, 1}, GclOptions{}, rng), LossError);
  EXPECT_THROW(loss_gcl(z, {0, 0}, GclOptions{}, rng), LossError);
}

TEST(CombinedLoss, Examples) {
  ad::Tape<double> tape;
  auto L = [&](double v) { return tape.constant({1, 1}, {v}); };
  std::array<ad::Tensor<double>, kNumTasks> l{L(0.3), L(1.2), L(0.4), L(2.0)};
  EXPECT_NEAR(combined_loss(l, tape.constant({1, 4}, {0, 0, 0, 0})).item(), 3.9, 1e-12);
  std::array<ad::Tensor<double>, kNumTasks> e{L(std::exp(1.0)), L(0), L(0), L(0)};
  EXPECT_NEAR(combined_loss(e, tape.constant({1, 4}, {1, 0, 0, 0})).item(), 1.5, 1e-12);
}

TEST(CombinedLoss, GradientWithRespectToS) {
  std::array<double, kNumTasks> lv{0.3, 1.2, 0.4, 2.0};
  std::array<double, kNumTasks> sv{0.2, -0.5, 1.1, 0.0};
  ad::Tape<double> tape;
  std::array<ad::Tensor<double>, kNumTasks> l;
  for (std::size_t t = 0; t < kNumTasks; ++t) l[t] = tape.constant({1, 1}, {lv[t]});
  auto s = tape.variable({1, 4}, {sv.begin(), sv.end()});
  tape.backward(combined_loss(l, s));
  for (std::size_t t = 0; t < kNumTasks; ++t) {
    EXPECT_NEAR(s.grad()[t], -std::exp(-sv[t]) * lv[t] + 0.5, 1e-14);
    auto f = [&](double x) {
      double total = 0;
      for (std::size_t u = 0; u < kNumTasks; ++u) {
        double su = u == t ? x : sv[u];
        total += std::exp(-su) * lv[u] + su / 2;
      }
      return total;
    };
    EXPECT_NEAR(s.grad()[t], (f(sv[t] + 1e-6) - f(sv[t] - 1e-6)) / 2e-6, 1e-8);
    // Stationary point: sigma^2 = 2 L.
    EXPECT_NEAR(-std::exp(-std::log(2 * lv[t])) * lv[t] + 0.5, 0.0, 1e-15);
  }
}

TEST(Metrics, AccuracyMatchesNaiveRecount) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 20; ++t) {
    std::size_t n = 2 + rng() % 20, d = 1 + rng() % 6;
    std::vector<std::vector<double>> z(n, std::vector<double>(d));
    std::vector<double> flat;
    std::vector<std::uint32_t> lab(n);
    for (std::size_t i = 0; i < n; ++i) {
      lab[i] = static_cast<std::uint32_t>(rng() % 3);
      for (auto& x : z[i]) flat.push_back(x = nd(rng));
    }
    EXPECT_DOUBLE_EQ(acc_cd(flat, d, lab), naive_pair_accuracy(z, lab, 0.5));
    EXPECT_DOUBLE_EQ(acc_gcl(flat, d, lab), naive_pair_accuracy(z, lab, 0.0));
  }
}

TEST(Metrics, PerfectAndRandom) {
  std::vector<double> z{1, 0, 1, 0, 0, 1, 0, 1};
  std::vector<std::uint32_t> c{0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(acc_cd(z, 2, c), 1.0);
  EXPECT_DOUBLE_EQ(acc_gcl(std::vector<double>{1, 0, 1, 0, -1, 0, -1, 0}, 2, c), 1.0);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  std::size_t n = 142;
  std::vector<double> rnd(n * 8);
  for (auto& x : rnd) x = nd(rng);
  std::vector<std::uint32_t> tags(n);
  for (std::size_t i = 0; i < n; ++i) tags[i] = static_cast<std::uint32_t>(i % 2);
  EXPECT_NEAR(acc_gcl(rnd, 8, tags), 0.5, 0.03);
  EXPECT_DOUBLE_EQ(mean_squared_error(std::vector<double>{1, 2}, std::vector<double>{0, 4}), 2.5);
  EXPECT_DOUBLE_EQ(cosine(std::vector<double>{3, 4}, std::vector<double>{6, 8}), 1.0);
}
