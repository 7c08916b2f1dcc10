#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfse/graph.h"
#include "gfse/optim.h"
#include "gfse/tensor.h"

namespace gfse {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GfseConfig {
  std::size_t d = 8;         // walk steps of the input encodings
  std::size_t layers = 3;
  std::size_t heads = 4;
  std::size_t hidden = 64;
  std::size_t out_dim = 32;  // d_e
  std::size_t embed_dim = 32;  // d_z of the CD and GCL heads
  std::size_t motif_k = 29;
  double gin_eps = 0.0;
  bool use_mpnn = true;
  bool use_attention = true;
  bool attention_bias = true;
  bool static_edges = false;
  std::string dtype = "f32";

  void validate() const;
};

/// Per-graph inputs: random-walk encodings plus index tables for the
/// message-passing and pair gathers.
struct GraphTensors {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> p;  // n x d
  std::vector<double> r;  // n*n x d, row i*n+j
  std::vector<std::uint32_t> edge_dst;      // directed edges grouped by source
  std::vector<std::uint32_t> edge_pair;     // src*n+dst
  std::vector<std::uint32_t> edge_offsets;  // n+1
  std::vector<std::uint32_t> pair_i, pair_j;  // endpoints of every R row
};

/// Rejects graphs with isolated nodes.
GraphTensors prepare_graph(const Graph& g, std::size_t d);

template <class T>
struct ForwardTrace {
  std::vector<std::vector<ad::Tensor<T>>> attention;  // [layer][head], n x n
};

template <class T>
class GfseModel {
 public:
  using Tensor = ad::Tensor<T>;

  /// Parameters bound to one tape.
  class Bound {
   public:
    const Tensor& operator()(const std::string& name) const { return t_[m_->params_.index(name)]; }
    const std::vector<Tensor>& tensors() const { return t_; }

   private:
    friend class GfseModel;
    Bound(const GfseModel* m, std::vector<Tensor> t) : m_(m), t_(std::move(t)) {}
    const GfseModel* m_;
    std::vector<Tensor> t_;
  };

  /// Uniform Glorot initialisation, deterministic in `seed`.
  GfseModel(GfseConfig cfg, std::uint64_t seed);
  GfseModel(GfseConfig cfg, ad::ParamSet<T> params);

  const GfseConfig& config() const { return cfg_; }
  ad::ParamSet<T>& params() { return params_; }
  const ad::ParamSet<T>& params() const { return params_; }

  Bound bind(ad::Tape<T>& tape, bool trainable) const {
    return Bound(this, params_.bind(tape, trainable));
  }
  /// Wraps tensors already recorded in parameter order.
  Bound adopt(std::vector<Tensor> tensors) const {
    if (tensors.size() != params_.size())
      throw std::invalid_argument("adopt: expected " + std::to_string(params_.size()) + " tensors");
    return Bound(this, std::move(tensors));
  }

  /// n x out_dim node encodings.
  Tensor forward(const Bound& b, const GraphTensors& g, ForwardTrace<T>* trace = nullptr) const;

  /// Multi-head attention over all node pairs with per-head additive bias
  /// from the pair states.
  Tensor biased_attention(const Bound& b, const Tensor& p, const Tensor& r, std::size_t layer,
                          std::size_t n, ForwardTrace<T>* trace = nullptr) const;
  /// GIN update with edge features on the normalised `p`, `r`; returns the
  /// node messages and `r_state` plus the edge-MLP residual.
  std::pair<Tensor, Tensor> gin_message_pass(const Bound& b, const Tensor& p, const Tensor& r,
                                             const Tensor& r_state, std::size_t layer,
                                             const GraphTensors& g) const;

  /// m x 1 predictions for ordered pairs (i[k], j[k]).
  Tensor spd_head(const Bound& b, const Tensor& out, const std::vector<std::uint32_t>& i,
                  const std::vector<std::uint32_t>& j) const;
  Tensor motif_head(const Bound& b, const Tensor& out) const;
  /// Node embeddings for community detection, centred per graph.
  Tensor cd_embed(const Bound& b, const Tensor& out) const;
  /// 1 x embed_dim, mean-pooled.
  Tensor gcl_embed(const Bound& b, const Tensor& out) const;

  /// Forward pass without gradients; returns the n x out_dim values.
  std::vector<T> encode(const GraphTensors& g) const;

 private:
  Tensor mlp(const Bound& b, const std::string& prefix, const Tensor& x) const;

  GfseConfig cfg_;
  ad::ParamSet<T> params_;
};

/// Parameter names and shapes for a config, in creation order.
std::vector<std::pair<std::string, ad::Shape>> parameter_layout(const GfseConfig& cfg);

}  // namespace gfse
