#define EIGEN_DONT_PARALLELIZE
#include "gfse/tensor.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

namespace gfse::ad {
namespace {

template <class T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using CMap = Eigen::Map<const RowMat<T>>;
template <class T>
using MMap = Eigen::Map<RowMat<T>>;

template <class T>
CMap<T> cmap(const std::vector<T>& v, std::size_t r, std::size_t c) {
  return CMap<T>(v.data(), static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
}
template <class T>
MMap<T> mmap(std::vector<T>& v, std::size_t r, std::size_t c) {
  return MMap<T>(v.data(), static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
}

void require_2d(const Shape& s, const char* op) {
  if (s.size() != 2) throw ShapeError(std::string(op) + ": expected a matrix, got " + shape_str(s));
}

template <class T>
void same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  if (a.shape() != b.shape())
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                     shape_str(b.shape()));
}

// Leading size and last-dimension size of an n-d shape.
std::pair<std::size_t, std::size_t> flat2(const Shape& s) {
  std::size_t last = s.empty() ? 1 : s.back();
  return {last == 0 ? 0 : numel(s) / last, last};
}

template <class T>
bool wants(Tape<T>& t, std::size_t id) {
  return t.node(id).requires_grad;
}

}  // namespace

std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

std::size_t numel(const Shape& s) {
  return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

// ---- Tensor ---------------------------------------------------------------

template <class T>
const Shape& Tensor<T>::shape() const {
  return tape_->node(id_).shape;
}
template <class T>
std::size_t Tensor<T>::size() const {
  return tape_->node(id_).value.size();
}
template <class T>
std::span<const T> Tensor<T>::data() const {
  return tape_->node(id_).value;
}
template <class T>
std::span<const T> Tensor<T>::grad() const {
  return tape_->node(id_).grad;
}
template <class T>
T Tensor<T>::item() const {
  if (size() != 1) throw ShapeError("item() on non-scalar " + shape_str(shape()));
  return data()[0];
}
template <class T>
bool Tensor<T>::requires_grad() const {
  return tape_->node(id_).requires_grad;
}

// ---- Tape -----------------------------------------------------------------

template <class T>
Tensor<T> Tape<T>::constant(Shape shape, std::vector<T> values) {
  if (numel(shape) != values.size())
    throw ShapeError("constant: " + shape_str(shape) + " needs " + std::to_string(numel(shape)) +
                     " values, got " + std::to_string(values.size()));
  nodes_.push_back({std::move(shape), std::move(values), {}, false, nullptr});
  return Tensor<T>(this, nodes_.size() - 1);
}

template <class T>
Tensor<T> Tape<T>::variable(Shape shape, std::vector<T> values) {
  auto t = constant(std::move(shape), std::move(values));
  nodes_.back().requires_grad = true;
  return t;
}

template <class T>
Tensor<T> Tape<T>::record(const char* op, Shape shape, std::vector<T> value,
                          std::initializer_list<Tensor<T>> parents, BackwardFn backward) {
  return record(op, std::move(shape), std::move(value), std::vector<Tensor<T>>(parents),
                std::move(backward));
}

template <class T>
Tensor<T> Tape<T>::record(const char* op, Shape shape, std::vector<T> value,
                          const std::vector<Tensor<T>>& parents, BackwardFn backward) {
  if (done_) throw TapeError(std::string(op) + ": tape already consumed by backward()");
  bool req = false;
  for (const auto& p : parents) {
    if (p.tape() != this) throw TapeError(std::string(op) + ": operand from another tape");
    req = req || nodes_[p.id()].requires_grad;
  }
  for (const T& x : value)
    if (!std::isfinite(x)) throw NumericError(std::string(op) + ": non-finite value in forward result");
  nodes_.push_back({std::move(shape), std::move(value), {}, req, req ? std::move(backward) : nullptr});
  return Tensor<T>(this, nodes_.size() - 1);
}

template <class T>
std::vector<T>& Tape<T>::grad_buffer(std::size_t id) {
  auto& n = nodes_[id];
  if (n.grad.empty()) n.grad.assign(n.value.size(), T(0));
  return n.grad;
}

template <class T>
void Tape<T>::backward(const Tensor<T>& loss) {
  if (done_) throw TapeError("backward() called twice without a new forward pass");
  if (loss.tape() != this) throw TapeError("backward(): loss recorded on another tape");
  if (loss.size() != 1) throw ShapeError("backward(): loss must be scalar, got " + shape_str(loss.shape()));
  if (!nodes_[loss.id()].requires_grad) throw TapeError("backward(): loss does not depend on any variable");
  done_ = true;
  grad_buffer(loss.id())[0] = T(1);
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    auto& n = nodes_[id];
    if (n.backward && !n.grad.empty()) n.backward(*this, id);
  }
  for (auto& n : nodes_)
    if (n.requires_grad && !n.backward && n.grad.empty()) n.grad.assign(n.value.size(), T(0));
}

// ---- ops ------------------------------------------------------------------

template <class T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  require_2d(a.shape(), "matmul");
  require_2d(b.shape(), "matmul");
  std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k)
    throw ShapeError("matmul: shape mismatch " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
  auto& tape = *a.tape();
  std::vector<T> out(m * n);
  mmap(out, m, n).noalias() = cmap(tape.node(a.id()).value, m, k) * cmap(tape.node(b.id()).value, k, n);
  auto ia = a.id(), ib = b.id();
  return tape.record("matmul", {m, n}, std::move(out), {a, b}, [=](Tape<T>& t, std::size_t self) {
    auto dc = cmap(t.node(self).grad, m, n);
    if (wants(t, ia)) mmap(t.grad_buffer(ia), m, k).noalias() += dc * cmap(t.node(ib).value, k, n).transpose();
    if (wants(t, ib)) mmap(t.grad_buffer(ib), k, n).noalias() += cmap(t.node(ia).value, m, k).transpose() * dc;
  });
}

template <class T>
Tensor<T> matmul_nt(const Tensor<T>& a, const Tensor<T>& b) {
  require_2d(a.shape(), "matmul_nt");
  require_2d(b.shape(), "matmul_nt");
  std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(0);
  if (b.dim(1) != k)
    throw ShapeError("matmul_nt: shape mismatch " + shape_str(a.shape()) + " x " +
                     shape_str(b.shape()) + "^T");
  auto& tape = *a.tape();
  std::vector<T> out(m * n);
  mmap(out, m, n).noalias() =
      cmap(tape.node(a.id()).value, m, k) * cmap(tape.node(b.id()).value, n, k).transpose();
  auto ia = a.id(), ib = b.id();
  return tape.record("matmul_nt", {m, n}, std::move(out), {a, b}, [=](Tape<T>& t, std::size_t self) {
    auto dc = cmap(t.node(self).grad, m, n);
    if (wants(t, ia)) mmap(t.grad_buffer(ia), m, k).noalias() += dc * cmap(t.node(ib).value, n, k);
    if (wants(t, ib)) mmap(t.grad_buffer(ib), n, k).noalias() += dc.transpose() * cmap(t.node(ia).value, m, k);
  });
}

template <class T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  same_shape(a, b, "add");
  std::vector<T> out(a.data().begin(), a.data().end());
  auto bd = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bd[i];
  auto ia = a.id(), ib = b.id();
  return a.tape()->record("add", a.shape(), std::move(out), {a, b}, [=](Tape<T>& t, std::size_t self) {
    const auto& g = t.node(self).grad;
    for (auto p : {ia, ib})
      if (wants(t, p)) {
        auto& d = t.grad_buffer(p);
        for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
      }
  });
}

template <class T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  same_shape(a, b, "sub");
  std::vector<T> out(a.data().begin(), a.data().end());
  auto bd = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bd[i];
  auto ia = a.id(), ib = b.id();
  return a.tape()->record("sub", a.shape(), std::move(out), {a, b}, [=](Tape<T>& t, std::size_t self) {
    const auto& g = t.node(self).grad;
    if (wants(t, ia)) {
      auto& d = t.grad_buffer(ia);
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
    }
    if (wants(t, ib)) {
      auto& d = t.grad_buffer(ib);
      for (std::size_t i = 0; i < g.size(); ++i) d[i] -= g[i];
    }
  });
}

template <class T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  same_shape(a, b, "mul");
  std::vector<T> out(a.data().begin(), a.data().end());
  auto bd = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bd[i];
  auto ia = a.id(), ib = b.id();
  return a.tape()->record("mul", a.shape(), std::move(out), {a, b}, [=](Tape<T>& t, std::size_t self) {
    const auto& g = t.node(self).grad;
    if (wants(t, ia)) {
      auto& d = t.grad_buffer(ia);
      const auto& bv = t.node(ib).value;
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * bv[i];
    }
    if (wants(t, ib)) {
      auto& d = t.grad_buffer(ib);
      const auto& av = t.node(ia).value;
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * av[i];
    }
  });
}

template <class T>
Tensor<T> add_bias(const Tensor<T>& a, const Tensor<T>& bias) {
  auto [r, c] = flat2(a.shape());
  if (bias.size() != c)
    throw ShapeError("add_bias: bias " + shape_str(bias.shape()) + " does not match " + shape_str(a.shape()));
  std::vector<T> out(a.data().begin(), a.data().end());
  auto bd = bias.data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] += bd[j];
  auto ia = a.id(), ib = bias.id();
  return a.tape()->record("add_bias", a.shape(), std::move(out), {a, bias},
                          [=](Tape<T>& t, std::size_t self) {
                            const auto& g = t.node(self).grad;
                            if (wants(t, ia)) {
                              auto& d = t.grad_buffer(ia);
                              for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
                            }
                            if (wants(t, ib)) {
                              auto& d = t.grad_buffer(ib);
                              for (std::size_t i = 0; i < r; ++i)
                                for (std::size_t j = 0; j < c; ++j) d[j] += g[i * c + j];
                            }
                          });
}

template <class T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  std::vector<T> out(a.data().begin(), a.data().end());
  for (auto& x : out) x *= factor;
  auto ia = a.id();
  return a.tape()->record("scale", a.shape(), std::move(out), {a}, [=](Tape<T>& t, std::size_t self) {
    const auto& g = t.node(self).grad;
    auto& d = t.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * factor;
  });
}

template <class T>
Tensor<T> add_scalar(const Tensor<T>& a, T value) {
  std::vector<T> out(a.data().begin(), a.data().end());
  for (auto& x : out) x += value;
  auto ia = a.id();
  return a.tape()->record("add_scalar", a.shape(), std::move(out), {a}, [=](Tape<T>& t, std::size_t self) {
    const auto& g = t.node(self).grad;
    auto& d = t.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
  });
}

template <class T>
Tensor<T> relu(const Tensor<T>& a) {
  std::vector<T> out(a.data().begin(), a.data().end());
  for (auto& x : out) x = x > T(0) ? x : T(0);
  auto ia = a.id();
  return a.tape()->record("relu", a.shape(), std::move(out), {a}, [=](Tape<T>& t, std::size_t self) {
    const auto& g = t.node(self).grad;
    const auto& x = t.node(ia).value;
    auto& d = t.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (x[i] > T(0)) d[i] += g[i];
  });
}

template <class T>
Tensor<T> exp(const Tensor<T>& a) {
  std::vector<T> out(a.data().begin(), a.data().end());
  for (auto& x : out) x = std::exp(x);
  auto ia = a.id();
  return a.tape()->record("exp", a.shape(), std::move(out), {a}, [=](Tape<T>& t, std::size_t self) {
    const auto& g = t.node(self).grad;
    const auto& y = t.node(self).value;
    auto& d = t.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * y[i];
  });
}

template <class T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts) {
  if (parts.empty()) throw ShapeError("concat: no operands");
  Shape base = parts[0].shape();
  auto rows = flat2(base).first;
  std::vector<std::size_t> widths, ids;
  std::size_t total = 0;
  for (const auto& p : parts) {
    Shape s = p.shape();
    auto [r, c] = flat2(s);
    Shape a = s, b = base;
    a.pop_back();
    b.pop_back();
    if (a != b || r != rows)
      throw ShapeError("concat: shape mismatch " + shape_str(base) + " vs " + shape_str(s));
    widths.push_back(c);
    ids.push_back(p.id());
    total += c;
  }
  std::vector<T> out(rows * total);
  std::size_t off = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    auto d = parts[k].data();
    for (std::size_t i = 0; i < rows; ++i)
      std::copy_n(d.begin() + static_cast<std::ptrdiff_t>(i * widths[k]), widths[k],
                  out.begin() + static_cast<std::ptrdiff_t>(i * total + off));
    off += widths[k];
  }
  Shape shape = base;
  shape.back() = total;
  return parts[0].tape()->record("concat", shape, std::move(out), parts, [=](Tape<T>& t, std::size_t self) {
    const auto& g = t.node(self).grad;
    std::size_t o = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (wants(t, ids[k])) {
        auto& d = t.grad_buffer(ids[k]);
        for (std::size_t i = 0; i < rows; ++i)
          for (std::size_t j = 0; j < widths[k]; ++j) d[i * widths[k] + j] += g[i * total + o + j];
      }
      o += widths[k];
    }
  });
}

template <class T>
Tensor<T> concat_rows(const std::vector<Tensor<T>>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no operands");
  std::size_t c = parts[0].cols();
  std::size_t rows = 0;
  std::vector<std::size_t> ids, sizes;
  for (const auto& p : parts) {
    require_2d(p.shape(), "concat_rows");
    if (p.cols() != c)
      throw ShapeError("concat_rows: shape mismatch " + shape_str(parts[0].shape()) + " vs " +
                       shape_str(p.shape()));
    rows += p.rows();
    ids.push_back(p.id());
    sizes.push_back(p.size());
  }
  std::vector<T> out;
  out.reserve(rows * c);
  for (const auto& p : parts) out.insert(out.end(), p.data().begin(), p.data().end());
  return parts[0].tape()->record("concat_rows", {rows, c}, std::move(out), parts,
                                 [=](Tape<T>& t, std::size_t self) {
                                   const auto& g = t.node(self).grad;
                                   std::size_t o = 0;
                                   for (std::size_t k = 0; k < ids.size(); ++k) {
                                     if (wants(t, ids[k])) {
                                       auto& d = t.grad_buffer(ids[k]);
                                       for (std::size_t i = 0; i < sizes[k]; ++i) d[i] += g[o + i];
                                     }
                                     o += sizes[k];
                                   }
                                 });
}

template <class T>
Tensor<T> slice_cols(const Tensor<T>& a, std::size_t start, std::size_t len) {
  auto [r, c] = flat2(a.shape());
  if (start + len > c)
    throw ShapeError("slice_cols: [" + std::to_string(start) + ", " + std::to_string(start + len) +
                     ") out of range for " + shape_str(a.shape()));
  std::vector<T> out(r * len);
  auto d = a.data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < len; ++j) out[i * len + j] = d[i * c + start + j];
  Shape shape = a.shape();
  shape.back() = len;
  auto ia = a.id();
  return a.tape()->record("slice_cols", shape, std::move(out), {a}, [=](Tape<T>& t, std::size_t self) {
    const auto& g = t.node(self).grad;
    auto& dd = t.grad_buffer(ia);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < len; ++j) dd[i * c + start + j] += g[i * len + j];
  });
}

template <class T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape) {
  if (numel(shape) != a.size())
    throw ShapeError("reshape: " + shape_str(a.shape()) + " -> " + shape_str(shape));
  std::vector<T> out(a.data().begin(), a.data().end());
  auto ia = a.id();
  return a.tape()->record("reshape", std::move(shape), std::move(out), {a}, [=](Tape<T>& t, std::size_t self) {
    const auto& g = t.node(self).grad;
    auto& d = t.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
  });
}

template <class T>
Tensor<T> row_softmax(const Tensor<T>& a) {
  auto [r, c] = flat2(a.shape());
  std::vector<T> out(a.data().begin(), a.data().end());
  for (std::size_t i = 0; i < r; ++i) {
    T* row = out.data() + i * c;
    T m = *std::max_element(row, row + c);
    T s = 0;
    for (std::size_t j = 0; j < c; ++j) s += (row[j] = std::exp(row[j] - m));
    for (std::size_t j = 0; j < c; ++j) row[j] /= s;
  }
  auto ia = a.id();
  return a.tape()->record("row_softmax", a.shape(), std::move(out), {a}, [=](Tape<T>& t, std::size_t self) {
    const auto& g = t.node(self).grad;
    const auto& y = t.node(self).value;
    auto& d = t.grad_buffer(ia);
    for (std::size_t i = 0; i < r; ++i) {
      T dot = 0;
      for (std::size_t j = 0; j < c; ++j) dot += g[i * c + j] * y[i * c + j];
      for (std::size_t j = 0; j < c; ++j) d[i * c + j] += y[i * c + j] * (g[i * c + j] - dot);
    }
  });
}

template <class T>
Tensor<T> layer_norm(const Tensor<T>& a, const Tensor<T>& gamma, const Tensor<T>& beta, T eps) {
  auto [r, c] = flat2(a.shape());
  if (gamma.size() != c || beta.size() != c)
    throw ShapeError("layer_norm: affine params " + shape_str(gamma.shape()) + "/" +
                     shape_str(beta.shape()) + " do not match " + shape_str(a.shape()));
  auto x = a.data();
  auto gm = gamma.data();
  auto bt = beta.data();
  std::vector<T> xhat(r * c), inv_std(r), out(r * c);
  for (std::size_t i = 0; i < r; ++i) {
    T mean = 0, var = 0;
    for (std::size_t j = 0; j < c; ++j) mean += x[i * c + j];
    mean /= static_cast<T>(c);
    for (std::size_t j = 0; j < c; ++j) {
      T dx = x[i * c + j] - mean;
      var += dx * dx;
    }
    var /= static_cast<T>(c);
    inv_std[i] = T(1) / std::sqrt(var + eps);
    for (std::size_t j = 0; j < c; ++j) {
      xhat[i * c + j] = (x[i * c + j] - mean) * inv_std[i];
      out[i * c + j] = xhat[i * c + j] * gm[j] + bt[j];
    }
  }
  auto ia = a.id(), ig = gamma.id(), ib = beta.id();
  return a.tape()->record(
      "layer_norm", a.shape(), std::move(out), {a, gamma, beta},
      [=, xhat = std::move(xhat), inv_std = std::move(inv_std)](Tape<T>& t, std::size_t self) {
        const auto& g = t.node(self).grad;
        const auto& gmv = t.node(ig).value;
        if (wants(t, ig)) {
          auto& d = t.grad_buffer(ig);
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) d[j] += g[i * c + j] * xhat[i * c + j];
        }
        if (wants(t, ib)) {
          auto& d = t.grad_buffer(ib);
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) d[j] += g[i * c + j];
        }
        if (wants(t, ia)) {
          auto& d = t.grad_buffer(ia);
          for (std::size_t i = 0; i < r; ++i) {
            T mean_d = 0, mean_dx = 0;
            for (std::size_t j = 0; j < c; ++j) {
              T dh = g[i * c + j] * gmv[j];
              mean_d += dh;
              mean_dx += dh * xhat[i * c + j];
            }
            mean_d /= static_cast<T>(c);
            mean_dx /= static_cast<T>(c);
            for (std::size_t j = 0; j < c; ++j) {
              T dh = g[i * c + j] * gmv[j];
              d[i * c + j] += inv_std[i] * (dh - mean_d - xhat[i * c + j] * mean_dx);
            }
          }
        }
      });
}

template <class T>
Tensor<T> mean_pool(const Tensor<T>& a) {
  require_2d(a.shape(), "mean_pool");
  std::size_t r = a.rows(), c = a.cols();
  if (r == 0) throw ShapeError("mean_pool: no rows");
  std::vector<T> out(c, T(0));
  auto x = a.data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j] += x[i * c + j];
  for (auto& v : out) v /= static_cast<T>(r);
  auto ia = a.id();
  return a.tape()->record("mean_pool", {1, c}, std::move(out), {a}, [=](Tape<T>& t, std::size_t self) {
    const auto& g = t.node(self).grad;
    auto& d = t.grad_buffer(ia);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) d[i * c + j] += g[j] / static_cast<T>(r);
  });
}

template <class T>
Tensor<T> gather_rows(const Tensor<T>& a, std::vector<std::uint32_t> index) {
  auto [r, c] = flat2(a.shape());
  std::vector<T> out(index.size() * c);
  auto x = a.data();
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (index[k] >= r)
      throw ShapeError("gather_rows: index " + std::to_string(index[k]) + " out of range for " +
                       shape_str(a.shape()));
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(index[k] * c), c,
                out.begin() + static_cast<std::ptrdiff_t>(k * c));
  }
  auto ia = a.id();
  std::size_t m = index.size();
  return a.tape()->record("gather_rows", {m, c}, std::move(out), {a},
                          [=, index = std::move(index)](Tape<T>& t, std::size_t self) {
                            const auto& g = t.node(self).grad;
                            auto& d = t.grad_buffer(ia);
                            for (std::size_t k = 0; k < index.size(); ++k)
                              for (std::size_t j = 0; j < c; ++j) d[index[k] * c + j] += g[k * c + j];
                          });
}

template <class T>
Tensor<T> segment_sum(const Tensor<T>& a, std::vector<std::uint32_t> offsets) {
  auto [r, c] = flat2(a.shape());
  if (offsets.empty() || offsets.front() != 0 || offsets.back() != r)
    throw ShapeError("segment_sum: offsets do not cover " + shape_str(a.shape()));
  std::size_t segs = offsets.size() - 1;
  std::vector<T> out(segs * c, T(0));
  auto x = a.data();
  for (std::size_t s = 0; s < segs; ++s) {
    if (offsets[s] > offsets[s + 1]) throw ShapeError("segment_sum: offsets not monotone");
    for (std::size_t i = offsets[s]; i < offsets[s + 1]; ++i)
      for (std::size_t j = 0; j < c; ++j) out[s * c + j] += x[i * c + j];
  }
  auto ia = a.id();
  return a.tape()->record("segment_sum", {segs, c}, std::move(out), {a},
                          [=, offsets = std::move(offsets)](Tape<T>& t, std::size_t self) {
                            const auto& g = t.node(self).grad;
                            auto& d = t.grad_buffer(ia);
                            for (std::size_t s = 0; s + 1 < offsets.size(); ++s)
                              for (std::size_t i = offsets[s]; i < offsets[s + 1]; ++i)
                                for (std::size_t j = 0; j < c; ++j) d[i * c + j] += g[s * c + j];
                          });
}

template <class T>
Tensor<T> sum(const Tensor<T>& a) {
  T s = 0;
  for (T x : a.data()) s += x;
  auto ia = a.id();
  return a.tape()->record("sum", {1, 1}, {s}, {a}, [=](Tape<T>& t, std::size_t self) {
    T g = t.node(self).grad[0];
    for (auto& d : t.grad_buffer(ia)) d += g;
  });
}

template <class T>
Tensor<T> mse(const Tensor<T>& a, const Tensor<T>& b) {
  same_shape(a, b, "mse");
  auto x = a.data(), y = b.data();
  if (x.empty()) throw ShapeError("mse: empty operands");
  T s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  auto n = static_cast<T>(x.size());
  auto ia = a.id(), ib = b.id();
  return a.tape()->record("mse", {1, 1}, {s / n}, {a, b}, [=](Tape<T>& t, std::size_t self) {
    T g = t.node(self).grad[0];
    const auto& xv = t.node(ia).value;
    const auto& yv = t.node(ib).value;
    if (wants(t, ia)) {
      auto& d = t.grad_buffer(ia);
      for (std::size_t i = 0; i < xv.size(); ++i) d[i] += g * T(2) * (xv[i] - yv[i]) / n;
    }
    if (wants(t, ib)) {
      auto& d = t.grad_buffer(ib);
      for (std::size_t i = 0; i < xv.size(); ++i) d[i] -= g * T(2) * (xv[i] - yv[i]) / n;
    }
  });
}

template <class T>
Tensor<T> cosine_similarity(const Tensor<T>& a, const Tensor<T>& b) {
  same_shape(a, b, "cosine_similarity");
  auto [r, c] = flat2(a.shape());
  auto x = a.data(), y = b.data();
  std::vector<T> out(r), na(r), nb(r);
  for (std::size_t i = 0; i < r; ++i) {
    T dot = 0, aa = 0, bb = 0;
    for (std::size_t j = 0; j < c; ++j) {
      dot += x[i * c + j] * y[i * c + j];
      aa += x[i * c + j] * x[i * c + j];
      bb += y[i * c + j] * y[i * c + j];
    }
    if (aa == T(0) || bb == T(0)) throw NumericError("cosine_similarity: zero-norm row " + std::to_string(i));
    na[i] = std::sqrt(aa);
    nb[i] = std::sqrt(bb);
    out[i] = dot / (na[i] * nb[i]);
  }
  auto ia = a.id(), ib = b.id();
  return a.tape()->record(
      "cosine_similarity", {r, 1}, std::move(out), {a, b},
      [=, na = std::move(na), nb = std::move(nb)](Tape<T>& t, std::size_t self) {
        const auto& g = t.node(self).grad;
        const auto& s = t.node(self).value;
        const auto& xv = t.node(ia).value;
        const auto& yv = t.node(ib).value;
        bool wa = wants(t, ia), wb = wants(t, ib);
        for (std::size_t i = 0; i < r; ++i) {
          T inv = T(1) / (na[i] * nb[i]);
          for (std::size_t j = 0; j < c; ++j) {
            if (wa)
              t.grad_buffer(ia)[i * c + j] +=
                  g[i] * (yv[i * c + j] * inv - s[i] * xv[i * c + j] / (na[i] * na[i]));
            if (wb)
              t.grad_buffer(ib)[i * c + j] +=
                  g[i] * (xv[i * c + j] * inv - s[i] * yv[i * c + j] / (nb[i] * nb[i]));
          }
        }
      });
}

template <class T>
Tensor<T> log_sum_exp(const Tensor<T>& a) {
  auto [r, c] = flat2(a.shape());
  if (c == 0) throw ShapeError("log_sum_exp: empty rows");
  auto x = a.data();
  std::vector<T> out(r);
  for (std::size_t i = 0; i < r; ++i) {
    T m = *std::max_element(x.begin() + static_cast<std::ptrdiff_t>(i * c),
                            x.begin() + static_cast<std::ptrdiff_t>((i + 1) * c));
    T s = 0;
    for (std::size_t j = 0; j < c; ++j) s += std::exp(x[i * c + j] - m);
    out[i] = m + std::log(s);
  }
  auto ia = a.id();
  return a.tape()->record("log_sum_exp", {r, 1}, std::move(out), {a}, [=](Tape<T>& t, std::size_t self) {
    const auto& g = t.node(self).grad;
    const auto& y = t.node(self).value;
    const auto& xv = t.node(ia).value;
    auto& d = t.grad_buffer(ia);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) d[i * c + j] += g[i] * std::exp(xv[i * c + j] - y[i]);
  });
}

#define GFSE_INSTANTIATE(T)                                                                      \
  template class Tensor<T>;                                                                      \
  template class Tape<T>;                                                                        \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&);                                 \
  template Tensor<T> matmul_nt(const Tensor<T>&, const Tensor<T>&);                              \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                    \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                                    \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                                    \
  template Tensor<T> add_bias(const Tensor<T>&, const Tensor<T>&);                               \
  template Tensor<T> scale(const Tensor<T>&, T);                                                 \
  template Tensor<T> add_scalar(const Tensor<T>&, T);                                            \
  template Tensor<T> relu(const Tensor<T>&);                                                     \
  template Tensor<T> exp(const Tensor<T>&);                                                      \
  template Tensor<T> concat(const std::vector<Tensor<T>>&);                                      \
  template Tensor<T> concat_rows(const std::vector<Tensor<T>>&);                                 \
  template Tensor<T> slice_cols(const Tensor<T>&, std::size_t, std::size_t);                     \
  template Tensor<T> reshape(const Tensor<T>&, Shape);                                           \
  template Tensor<T> row_softmax(const Tensor<T>&);                                              \
  template Tensor<T> layer_norm(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, T);        \
  template Tensor<T> mean_pool(const Tensor<T>&);                                                \
  template Tensor<T> gather_rows(const Tensor<T>&, std::vector<std::uint32_t>);                  \
  template Tensor<T> segment_sum(const Tensor<T>&, std::vector<std::uint32_t>);                  \
  template Tensor<T> sum(const Tensor<T>&);                                                      \
  template Tensor<T> mse(const Tensor<T>&, const Tensor<T>&);                                    \
  template Tensor<T> cosine_similarity(const Tensor<T>&, const Tensor<T>&);                      \
  template Tensor<T> log_sum_exp(const Tensor<T>&);

GFSE_INSTANTIATE(float)
GFSE_INSTANTIATE(double)

}  // namespace gfse::ad
