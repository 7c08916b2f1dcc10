#include "gfse/optim.h"

#include <cmath>

namespace gfse::ad {

template <class T>
std::size_t ParamSet<T>::add(std::string name, Shape shape, std::vector<T> value) {
  if (index_.count(name)) throw std::invalid_argument("duplicate parameter " + name);
  if (numel(shape) != value.size())
    throw ShapeError("parameter " + name + ": " + shape_str(shape) + " needs " +
                     std::to_string(numel(shape)) + " values");
  index_[name] = params_.size();
  params_.push_back({std::move(name), std::move(shape), std::move(value)});
  return params_.size() - 1;
}

template <class T>
std::size_t ParamSet<T>::index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown parameter " + name);
  return it->second;
}

template <class T>
std::size_t ParamSet<T>::num_values() const {
  std::size_t s = 0;
  for (const auto& p : params_) s += p.value.size();
  return s;
}

template <class T>
std::vector<Tensor<T>> ParamSet<T>::bind(Tape<T>& tape, bool trainable) const {
  std::vector<Tensor<T>> out;
  out.reserve(params_.size());
  for (const auto& p : params_)
    out.push_back(trainable ? tape.variable(p.shape, p.value) : tape.constant(p.shape, p.value));
  return out;
}

template <class T>
std::vector<std::vector<T>> collect_grads(const std::vector<Tensor<T>>& bound) {
  std::vector<std::vector<T>> out;
  out.reserve(bound.size());
  for (const auto& t : bound) {
    auto g = t.grad();
    if (g.empty()) out.emplace_back(t.size(), T(0));
    else out.emplace_back(g.begin(), g.end());
  }
  return out;
}

template <class T>
void Adam<T>::step(ParamSet<T>& params, const std::vector<std::vector<T>>& grads) {
  if (grads.size() != params.size())
    throw ShapeError("adam: " + std::to_string(grads.size()) + " gradients for " +
                     std::to_string(params.size()) + " parameters");
  if (m_.empty()) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_.emplace_back(params[i].value.size(), 0.0);
      v_.emplace_back(params[i].value.size(), 0.0);
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i)
    if (grads[i].size() != params[i].value.size() || m_[i].size() != params[i].value.size())
      throw ShapeError("adam: gradient shape mismatch for " + params[i].name);
  ++step_;
  double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& w = params[i].value;
    auto& m = m_[i];
    auto& v = v_[i];
    const auto& g = grads[i];
    for (std::size_t k = 0; k < w.size(); ++k) {
      double gk = static_cast<double>(g[k]);
      m[k] = cfg_.beta1 * m[k] + (1.0 - cfg_.beta1) * gk;
      v[k] = cfg_.beta2 * v[k] + (1.0 - cfg_.beta2) * gk * gk;
      double upd = cfg_.lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + cfg_.eps);
      w[k] = static_cast<T>(static_cast<double>(w[k]) - upd);
    }
  }
}

template <class T>
void Adam<T>::restore(std::uint64_t step, std::vector<std::vector<double>> m,
                      std::vector<std::vector<double>> v) {
  if (m.size() != v.size()) throw ShapeError("adam: moment count mismatch");
  step_ = step;
  m_ = std::move(m);
  v_ = std::move(v);
}

template class ParamSet<float>;
template class ParamSet<double>;
template class Adam<float>;
template class Adam<double>;
template std::vector<std::vector<float>> collect_grads(const std::vector<Tensor<float>>&);
template std::vector<std::vector<double>> collect_grads(const std::vector<Tensor<double>>&);

}  // namespace gfse::ad
