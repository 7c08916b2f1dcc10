#include "gfse/model.h"

#include <cmath>
#include <random>

#include "gfse/rng.h"
#include "gfse/walk_encoding.h"

namespace gfse {
namespace {

enum class Init { kGlorot, kZero, kOne };

struct Entry {
  std::string name;
  ad::Shape shape;
  Init init;
};

std::vector<Entry> layout(const GfseConfig& c) {
  std::size_t h = c.hidden;
  std::vector<Entry> e;
  auto linear = [&](const std::string& p, std::size_t in, std::size_t out) {
    e.push_back({p + ".w", {in, out}, Init::kGlorot});
    e.push_back({p + ".b", {1, out}, Init::kZero});
  };
  auto norm = [&](const std::string& p) {
    e.push_back({p + ".g", {1, h}, Init::kOne});
    e.push_back({p + ".b", {1, h}, Init::kZero});
  };
  linear("in.p", c.d, h);
  linear("in.r", c.d, h);
  for (std::size_t l = 0; l < c.layers; ++l) {
    std::string p = "l" + std::to_string(l) + ".";
    norm(p + "ln_p");
    norm(p + "ln_r");
    if (c.use_mpnn) {
      e.push_back({p + "gin.we", {h, h}, Init::kGlorot});
      linear(p + "gin.mlp1", h, h);
      linear(p + "gin.mlp2", h, h);
      if (!c.static_edges) {
        e.push_back({p + "edge.wr", {h, h}, Init::kGlorot});
        e.push_back({p + "edge.wi", {h, h}, Init::kGlorot});
        e.push_back({p + "edge.wj", {h, h}, Init::kGlorot});
        e.push_back({p + "edge.b1", {1, h}, Init::kZero});
        linear(p + "edge.mlp2", h, h);
      }
    }
    if (c.use_attention) {
      e.push_back({p + "att.wq", {h, h}, Init::kGlorot});
      e.push_back({p + "att.wk", {h, h}, Init::kGlorot});
      e.push_back({p + "att.wv", {h, h}, Init::kGlorot});
      linear(p + "att.o", h, h);
      if (c.attention_bias) e.push_back({p + "att.bias.w", {h, c.heads}, Init::kGlorot});
    }
    linear(p + "mlp1", h, h);
    linear(p + "mlp2", h, h);
  }
  norm("out.ln");
  linear("out", h, c.out_dim);
  linear("head.spd.mlp1", 2 * c.out_dim, h);
  linear("head.spd.mlp2", h, 1);
  linear("head.mc.mlp1", c.out_dim, h);
  linear("head.mc.mlp2", h, c.motif_k);
  linear("head.cd.mlp1", c.out_dim, h);
  e.push_back({"head.cd.mlp2.w", {h, c.embed_dim}, Init::kGlorot});
  linear("head.gcl.mlp1", c.out_dim, h);
  linear("head.gcl.mlp2", h, c.embed_dim);
  e.push_back({"unc.s", {1, 4}, Init::kZero});
  return e;
}

template <class T>
ad::Tensor<T> linear(const typename GfseModel<T>::Bound& b, const std::string& p, const ad::Tensor<T>& x) {
  return ad::add_bias(ad::matmul(x, b(p + ".w")), b(p + ".b"));
}

template <class T>
ad::Tensor<T> norm(const typename GfseModel<T>::Bound& b, const std::string& p, const ad::Tensor<T>& x) {
  return ad::layer_norm(x, b(p + ".g"), b(p + ".b"));
}

template <class T>
std::vector<T> cast(const std::vector<double>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

void GfseConfig::validate() const {
  if (d == 0 || layers == 0 || heads == 0 || hidden == 0 || out_dim == 0 || embed_dim == 0 ||
      motif_k == 0)
    throw ConfigError("model dimensions must be positive");
  if (hidden % heads != 0)
    throw ConfigError("hidden (" + std::to_string(hidden) + ") not divisible by heads (" +
                      std::to_string(heads) + ")");
  if (!use_mpnn && !use_attention) throw ConfigError("at least one of use_mpnn/use_attention required");
  if (dtype != "f32" && dtype != "f64") throw ConfigError("dtype must be f32 or f64, got " + dtype);
}

std::vector<std::pair<std::string, ad::Shape>> parameter_layout(const GfseConfig& cfg) {
  std::vector<std::pair<std::string, ad::Shape>> out;
  for (auto& e : layout(cfg)) out.emplace_back(e.name, e.shape);
  return out;
}

GraphTensors prepare_graph(const Graph& g, std::size_t d) {
  require_no_isolated_nodes(g);
  auto rel = relative_rw_encoding(g, d);
  auto node = diagonal(rel);
  GraphTensors t;
  t.n = g.num_nodes();
  t.d = d;
  t.p = std::move(node.values);
  t.r = std::move(rel.values);
  auto n = static_cast<std::uint32_t>(t.n);
  t.edge_offsets.push_back(0);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (NodeId j : g.neighbors(i)) {
      t.edge_dst.push_back(j);
      t.edge_pair.push_back(i * n + j);
    }
    t.edge_offsets.push_back(static_cast<std::uint32_t>(t.edge_dst.size()));
  }
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j) {
      t.pair_i.push_back(i);
      t.pair_j.push_back(j);
    }
  return t;
}

template <class T>
GfseModel<T>::GfseModel(GfseConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
  cfg_.validate();
  std::size_t idx = 0;
  for (auto& e : layout(cfg_)) {
    std::vector<T> v(ad::numel(e.shape), T(0));
    if (e.init == Init::kOne) std::fill(v.begin(), v.end(), T(1));
    if (e.init == Init::kGlorot) {
      double limit = std::sqrt(6.0 / static_cast<double>(e.shape[0] + e.shape[1]));
      std::mt19937_64 rng(mix_seed(seed, idx));
      std::uniform_real_distribution<double> u(-limit, limit);
      for (auto& x : v) x = static_cast<T>(u(rng));
    }
    params_.add(e.name, e.shape, std::move(v));
    ++idx;
  }
}

template <class T>
GfseModel<T>::GfseModel(GfseConfig cfg, ad::ParamSet<T> params)
    : cfg_(std::move(cfg)), params_(std::move(params)) {
  cfg_.validate();
  auto want = layout(cfg_);
  if (want.size() != params_.size())
    throw ConfigError("parameter count " + std::to_string(params_.size()) + " does not match config (" +
                      std::to_string(want.size()) + ")");
  for (std::size_t i = 0; i < want.size(); ++i)
    if (params_[i].name != want[i].name || params_[i].shape != want[i].shape)
      throw ConfigError("parameter " + params_[i].name + " " + ad::shape_str(params_[i].shape) +
                        " does not match expected " + want[i].name + " " + ad::shape_str(want[i].shape));
}

template <class T>
ad::Tensor<T> GfseModel<T>::mlp(const Bound& b, const std::string& prefix, const Tensor& x) const {
  return linear<T>(b, prefix + "mlp2", ad::relu(linear<T>(b, prefix + "mlp1", x)));
}

template <class T>
ad::Tensor<T> GfseModel<T>::biased_attention(const Bound& b, const Tensor& p, const Tensor& r,
                                             std::size_t layer, std::size_t n,
                                             ForwardTrace<T>* trace) const {
  std::string pre = "l" + std::to_string(layer) + ".att.";
  std::size_t hd = cfg_.hidden / cfg_.heads;
  if (p.rows() != n || r.rows() != n * n)
    throw ad::ShapeError("biased_attention: P " + ad::shape_str(p.shape()) + " and R " +
                         ad::shape_str(r.shape()) + " inconsistent for n=" + std::to_string(n));
  auto q = ad::matmul(p, b(pre + "wq"));
  auto k = ad::matmul(p, b(pre + "wk"));
  auto v = ad::matmul(p, b(pre + "wv"));
  Tensor bias;
  if (cfg_.attention_bias) bias = ad::matmul(r, b(pre + "bias.w"));
  T inv = T(1) / std::sqrt(static_cast<T>(hd));
  std::vector<Tensor> heads;
  for (std::size_t h = 0; h < cfg_.heads; ++h) {
    auto s = ad::scale(ad::matmul_nt(ad::slice_cols(q, h * hd, hd), ad::slice_cols(k, h * hd, hd)), inv);
    if (cfg_.attention_bias) s = ad::add(s, ad::reshape(ad::slice_cols(bias, h, 1), {n, n}));
    auto a = ad::row_softmax(s);
    if (trace) trace->attention[layer].push_back(a);
    heads.push_back(ad::matmul(a, ad::slice_cols(v, h * hd, hd)));
  }
  return linear<T>(b, pre + "o", ad::concat(heads));
}

template <class T>
std::pair<ad::Tensor<T>, ad::Tensor<T>> GfseModel<T>::gin_message_pass(
    const Bound& b, const Tensor& p, const Tensor& r, const Tensor& r_state, std::size_t layer,
    const GraphTensors& g) const {
  std::string pre = "l" + std::to_string(layer) + ".";
  if (p.rows() != g.n || r.rows() != g.n * g.n)
    throw ad::ShapeError("gin_message_pass: P " + ad::shape_str(p.shape()) + " and R " +
                         ad::shape_str(r.shape()) + " inconsistent for n=" + std::to_string(g.n));
  auto msg = ad::relu(ad::add(ad::gather_rows(p, g.edge_dst),
                              ad::matmul(ad::gather_rows(r, g.edge_pair), b(pre + "gin.we"))));
  auto agg = ad::segment_sum(msg, g.edge_offsets);
  auto pm = mlp(b, pre + "gin.", ad::add(ad::scale(p, static_cast<T>(1.0 + cfg_.gin_eps)), agg));
  if (cfg_.static_edges) return {pm, r_state};
  auto z = ad::add(ad::matmul(r, b(pre + "edge.wr")),
                   ad::add(ad::gather_rows(ad::matmul(p, b(pre + "edge.wi")), g.pair_i),
                           ad::gather_rows(ad::matmul(p, b(pre + "edge.wj")), g.pair_j)));
  z = ad::relu(ad::add_bias(z, b(pre + "edge.b1")));
  return {pm, ad::add(r_state, linear<T>(b, pre + "edge.mlp2", z))};
}

template <class T>
ad::Tensor<T> GfseModel<T>::forward(const Bound& b, const GraphTensors& g, ForwardTrace<T>* trace) const {
  if (g.d != cfg_.d)
    throw ad::ShapeError("forward: encodings have d=" + std::to_string(g.d) + ", model expects " +
                         std::to_string(cfg_.d));
  auto& tape = *b.tensors().front().tape();
  std::size_t n = g.n;
  auto p = linear<T>(b, "in.p", tape.constant({n, g.d}, cast<T>(g.p)));
  auto r = linear<T>(b, "in.r", tape.constant({n * n, g.d}, cast<T>(g.r)));
  if (trace) trace->attention.assign(cfg_.layers, {});
  for (std::size_t l = 0; l < cfg_.layers; ++l) {
    std::string pre = "l" + std::to_string(l) + ".";
    auto pn = norm<T>(b, pre + "ln_p", p);
    auto rn = norm<T>(b, pre + "ln_r", r);
    Tensor mix;
    Tensor r_next = r;
    if (cfg_.use_mpnn) std::tie(mix, r_next) = gin_message_pass(b, pn, rn, r, l, g);
    if (cfg_.use_attention) {
      auto pt = biased_attention(b, pn, rn, l, n, trace);
      mix = mix.valid() ? ad::add(mix, pt) : pt;
    }
    p = ad::add(p, mlp(b, pre, mix));
    r = r_next;
  }
  return linear<T>(b, "out", norm<T>(b, "out.ln", p));
}

template <class T>
ad::Tensor<T> GfseModel<T>::spd_head(const Bound& b, const Tensor& out, const std::vector<std::uint32_t>& i,
                                     const std::vector<std::uint32_t>& j) const {
  if (i.size() != j.size()) throw ad::ShapeError("spd_head: pair index lists differ in length");
  return mlp(b, "head.spd.", ad::concat<T>({ad::gather_rows(out, i), ad::gather_rows(out, j)}));
}

template <class T>
ad::Tensor<T> GfseModel<T>::motif_head(const Bound& b, const Tensor& out) const {
  return mlp(b, "head.mc.", out);
}

template <class T>
ad::Tensor<T> GfseModel<T>::cd_embed(const Bound& b, const Tensor& out) const {
  auto z = ad::matmul(ad::relu(linear<T>(b, "head.cd.mlp1", out)), b("head.cd.mlp2.w"));
  auto mean = ad::gather_rows(ad::mean_pool(z), std::vector<std::uint32_t>(z.rows(), 0));
  return ad::sub(z, mean);
}

template <class T>
ad::Tensor<T> GfseModel<T>::gcl_embed(const Bound& b, const Tensor& out) const {
  return ad::mean_pool(mlp(b, "head.gcl.", out));
}

template <class T>
std::vector<T> GfseModel<T>::encode(const GraphTensors& g) const {
  ad::Tape<T> tape;
  auto out = forward(bind(tape, false), g);
  return {out.data().begin(), out.data().end()};
}

template class GfseModel<float>;
template class GfseModel<double>;

}  // namespace gfse
