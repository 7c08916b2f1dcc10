#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "gfse/tensor.h"

namespace gfse::ad {

/// Named parameter tensors in insertion order.
template <class T>
class ParamSet {
 public:
  struct Param {
    std::string name;
    Shape shape;
    std::vector<T> value;
  };

  std::size_t add(std::string name, Shape shape, std::vector<T> value);
  std::size_t size() const { return params_.size(); }
  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  std::size_t index(const std::string& name) const;

  Param& operator[](std::size_t i) { return params_[i]; }
  const Param& operator[](std::size_t i) const { return params_[i]; }
  Param& at(const std::string& name) { return params_[index(name)]; }
  const Param& at(const std::string& name) const { return params_[index(name)]; }

  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }
  std::size_t num_values() const;

  /// Records every parameter on `tape` (as variables when `trainable`).
  std::vector<Tensor<T>> bind(Tape<T>& tape, bool trainable) const;

 private:
  std::vector<Param> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Gradients of bound parameters after backward, in ParamSet order.
template <class T>
std::vector<std::vector<T>> collect_grads(const std::vector<Tensor<T>>& bound);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam. Moments are kept in double regardless of T.
template <class T>
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  void step(ParamSet<T>& params, const std::vector<std::vector<T>>& grads);

  const AdamConfig& config() const { return cfg_; }
  std::uint64_t steps() const { return step_; }
  const std::vector<std::vector<double>>& first_moment() const { return m_; }
  const std::vector<std::vector<double>>& second_moment() const { return v_; }
  void restore(std::uint64_t step, std::vector<std::vector<double>> m,
               std::vector<std::vector<double>> v);

 private:
  AdamConfig cfg_;
  std::uint64_t step_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace gfse::ad
