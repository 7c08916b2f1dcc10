#include <gtest/gtest.h>

#include <cmath>

#include "../common/model_fixture.h"
#include "gfse/walk_encoding.h"
#include "../common/graphs.h"

using namespace gfse;
using gfse::testing::random_connected;
using gfse::testing::random_perm;

namespace {

template <class T>
std::vector<T> run(const GfseModel<T>& m, const Graph& g) {
  return m.encode(prepare_graph(g, m.config().d));
}

std::vector<double> gcl_of(const GfseModel<double>& m, const Graph& g) {
  ad::Tape<double> tape;
  auto b = m.bind(tape, false);
  auto z = m.gcl_embed(b, m.forward(b, prepare_graph(g, m.config().d)));
  return {z.data().begin(), z.data().end()};
}

std::vector<double> uniform(std::size_t count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(count);
  for (auto& x : v) x = u(rng);
  return v;
}

GfseConfig f64_config() {
  GfseConfig cfg;
  cfg.dtype = "f64";
  return cfg;
}

}  // namespace

TEST(Model, InitIsSeeded) {
  GfseModel<float> a(GfseConfig{}, 1), b(GfseConfig{}, 1), c(GfseConfig{}, 2);
  auto layout = parameter_layout(GfseConfig{});
  ASSERT_EQ(layout.size(), a.params().size());
  bool differs = false;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    EXPECT_EQ(a.params()[i].name, layout[i].first);
    EXPECT_EQ(a.params()[i].shape, layout[i].second);
    EXPECT_EQ(a.params()[i].value, b.params()[i].value);
    differs |= a.params()[i].value != c.params()[i].value;
    for (float x : a.params()[i].value) EXPECT_TRUE(std::isfinite(x));
  }
  EXPECT_TRUE(differs);
  EXPECT_EQ(a.params().at("unc.s").value, std::vector<float>(4, 0.0f));
  EXPECT_EQ(a.params().at("l0.ln_p.g").value, std::vector<float>(64, 1.0f));
}

TEST(Model, ConfigValidation) {
  GfseConfig cfg;
  cfg.heads = 5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.layers = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.use_mpnn = cfg.use_attention = false;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.dtype = "f16";
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_NO_THROW(GfseConfig{}.validate());
}

TEST(Model, ParamSetLayoutChecked) {
  GfseModel<double> m(f64_config(), 0);
  auto ps = m.params();
  EXPECT_NO_THROW(GfseModel<double>(f64_config(), ps));
  GfseConfig other = f64_config();
  other.layers = 2;
  EXPECT_THROW(GfseModel<double>(other, ps), ConfigError);
}

TEST(Model, SmallestGraph) {
  GfseModel<float> m(GfseConfig{}, 0);
  auto out = run(m, gfse::testing::path(2));
  ASSERT_EQ(out.size(), 2u * 32u);
  for (float x : out) EXPECT_TRUE(std::isfinite(x));
  EXPECT_THROW(prepare_graph(gfse::testing::make(3, {{0, 1}}), 8), WalkEncodingError);
}

TEST(Model, DeterministicOutput) {
  GfseModel<float> a(GfseConfig{}, 4), b(GfseConfig{}, 4);
  std::mt19937_64 rng(1);
  auto g = random_connected(12, 0.3, rng);
  EXPECT_EQ(run(a, g), run(b, g));
  EXPECT_EQ(run(a, g), run(a, g));
}

TEST(Model, PermutationEquivariance) {
  std::mt19937_64 rng(2);
  for (bool static_edges : {false, true}) {
    GfseConfig cfg = f64_config();
    cfg.static_edges = static_edges;
    GfseModel<double> m(cfg, 3);
    for (int t = 0; t < 8; ++t) {
      std::size_t n = 3 + rng() % 14;
      auto g = random_connected(n, 0.25, rng);
      auto perm = random_perm(n, rng);
      auto a = run(m, g);
      auto b = run(m, g.permuted(perm));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < cfg.out_dim; ++c)
          EXPECT_NEAR(b[perm[i] * cfg.out_dim + c], a[i * cfg.out_dim + c], 1e-8);
      auto za = gcl_of(m, g), zb = gcl_of(m, g.permuted(perm));
      for (std::size_t c = 0; c < za.size(); ++c) EXPECT_NEAR(za[c], zb[c], 1e-8);
    }
  }
}

TEST(Model, AttentionRowsSumToOne) {
  GfseModel<double> m(f64_config(), 5);
  std::mt19937_64 rng(6);
  auto gt = prepare_graph(random_connected(10, 0.3, rng), 8);
  ad::Tape<double> tape;
  ForwardTrace<double> trace;
  m.forward(m.bind(tape, false), gt, &trace);
  ASSERT_EQ(trace.attention.size(), 3u);
  for (auto& layer : trace.attention) {
    ASSERT_EQ(layer.size(), 4u);
    for (auto& a : layer)
      for (std::size_t i = 0; i < 10; ++i) {
        double s = 0;
        for (std::size_t j = 0; j < 10; ++j) s += a.data()[i * 10 + j];
        EXPECT_NEAR(s, 1.0, 1e-6);
      }
  }
}

TEST(Model, AttentionMatchesNaiveOracle) {
  GfseModel<double> m(f64_config(), 8);
  std::size_t n = 5, h = 64, heads = 4, hd = 16;
  std::mt19937_64 rng(9);
  auto p = uniform(n * h, rng);
  auto r = uniform(n * n * h, rng);
  ad::Tape<double> tape;
  auto b = m.bind(tape, false);
  auto out = m.biased_attention(b, tape.constant({n, h}, p), tape.constant({n * n, h}, r), 1, n);
  const auto& ps = m.params();
  auto W = [&](const std::string& name) { return ps.at("l1.att." + name).value; };
  auto wq = W("wq"), wk = W("wk"), wv = W("wv"), wo = W("o.w"), bo = W("o.b"), wb = W("bias.w");
  auto proj = [&](const std::vector<double>& w, std::size_t i, std::size_t c) {
    double s = 0;
    for (std::size_t x = 0; x < h; ++x) s += p[i * h + x] * w[x * h + c];
    return s;
  };
  std::vector<double> cat(n * h, 0.0);
  for (std::size_t head = 0; head < heads; ++head)
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> s(n);
      for (std::size_t j = 0; j < n; ++j) {
        double dot = 0;
        for (std::size_t c = head * hd; c < (head + 1) * hd; ++c) dot += proj(wq, i, c) * proj(wk, j, c);
        double bias = 0;
        for (std::size_t x = 0; x < h; ++x) bias += r[(i * n + j) * h + x] * wb[x * heads + head];
        s[j] = dot / std::sqrt(static_cast<double>(hd)) + bias;
      }
      double mx = *std::max_element(s.begin(), s.end()), z = 0;
      for (auto& x : s) z += (x = std::exp(x - mx));
      for (std::size_t c = head * hd; c < (head + 1) * hd; ++c)
        for (std::size_t j = 0; j < n; ++j) cat[i * h + c] += s[j] / z * proj(wv, j, c);
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < h; ++c) {
      double want = bo[c];
      for (std::size_t x = 0; x < h; ++x) want += cat[i * h + x] * wo[x * h + c];
      EXPECT_NEAR(out.data()[i * h + c], want, 1e-10);
    }
}

TEST(Model, ZeroBiasEqualsPlainAttention) {
  GfseModel<double> biased(f64_config(), 10);
  for (std::size_t l = 0; l < 3; ++l)
  {
    auto& v = biased.params().at("l" + std::to_string(l) + ".att.bias.w").value;
    std::fill(v.begin(), v.end(), 0.0);
  }
  GfseConfig plain_cfg = f64_config();
  plain_cfg.attention_bias = false;
  ad::ParamSet<double> plain_params;
  for (const auto& p : biased.params())
    if (p.name.find("att.bias") == std::string::npos) plain_params.add(p.name, p.shape, p.value);
  GfseModel<double> plain(plain_cfg, plain_params);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 5; ++t) {
    auto g = random_connected(4 + rng() % 10, 0.3, rng);
    EXPECT_EQ(run(biased, g), run(plain, g));
  }
}

TEST(Model, BranchAblationsRun) {
  std::mt19937_64 rng(12);
  auto g = random_connected(9, 0.3, rng);
  for (int mode = 0; mode < 2; ++mode) {
    GfseConfig cfg;
    (mode ? cfg.use_mpnn : cfg.use_attention) = false;
    GfseModel<float> m(cfg, 0);
    for (float x : run(m, g)) EXPECT_TRUE(std::isfinite(x));
  }
}

TEST(Model, HeadShapes) {
  GfseModel<double> m(f64_config(), 13);
  std::mt19937_64 rng(14);
  auto gt = prepare_graph(random_connected(7, 0.3, rng), 8);
  ad::Tape<double> tape;
  auto b = m.bind(tape, false);
  auto out = m.forward(b, gt);
  EXPECT_EQ(out.shape(), (ad::Shape{7, 32}));
  EXPECT_EQ(m.motif_head(b, out).shape(), (ad::Shape{7, 29}));
  EXPECT_EQ(m.cd_embed(b, out).shape(), (ad::Shape{7, 32}));
  EXPECT_EQ(m.gcl_embed(b, out).shape(), (ad::Shape{1, 32}));
  EXPECT_EQ(m.spd_head(b, out, {0, 1, 2}, {3, 4, 5}).shape(), (ad::Shape{3, 1}));
}

TEST(Model, FloatTracksDouble) {
  GfseModel<double> md(f64_config(), 15);
  ad::ParamSet<float> pf;
  for (const auto& p : md.params())
    pf.add(p.name, p.shape, std::vector<float>(p.value.begin(), p.value.end()));
  GfseModel<float> mf(GfseConfig{}, pf);
  std::mt19937_64 rng(16);
  auto g = random_connected(12, 0.3, rng);
  auto a = run(md, g);
  auto b = run(mf, g);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-3);
}

TEST(ModelGradient, EachTaskLossAndCombined) {
  gfse::testing::FourLossFixture fx;
  for (auto task : {std::optional<Task>(kTaskSpd), std::optional<Task>(kTaskMc),
                    std::optional<Task>(kTaskCd), std::optional<Task>(kTaskGcl),
                    std::optional<Task>()}) {
    auto rep = fx.check(task);
    EXPECT_LT(rep.max_rel_error, 1e-4) << (task ? static_cast<int>(*task) : -1) << " " << rep.worst
                                    << " analytic " << rep.worst_analytic << " numeric "
                                    << rep.worst_numeric;
    EXPECT_EQ(rep.checked, fx.model.params().num_values());
  }
}
