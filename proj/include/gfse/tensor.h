#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gfse::ad {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& s);
std::size_t numel(const Shape& s);

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A forward result contained NaN or Inf.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TapeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

template <class T>
class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the
/// tape lives.
template <class T>
class Tensor {
 public:
  Tensor() = default;

  const Shape& shape() const;
  std::size_t dim(std::size_t i) const { return shape().at(i); }
  std::size_t rows() const { return shape().at(0); }
  std::size_t cols() const { return shape().size() > 1 ? shape()[1] : 1; }
  std::size_t size() const;
  std::span<const T> data() const;
  /// Gradient after Tape::backward; empty if the value needs no gradient.
  std::span<const T> grad() const;
  T item() const;
  bool requires_grad() const;

  Tape<T>* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape<T>;
  Tensor(Tape<T>* tape, std::size_t id) : tape_(tape), id_(id) {}
  Tape<T>* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Records operations in execution order; backward() replays them once in
/// reverse. Single-threaded.
template <class T>
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t)>;

  struct Node {
    Shape shape;
    std::vector<T> value;
    std::vector<T> grad;
    bool requires_grad = false;
    BackwardFn backward;
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Tensor<T> constant(Shape shape, std::vector<T> values);
  Tensor<T> variable(Shape shape, std::vector<T> values);

  /// Records an op result. `parents` decide whether it needs a gradient;
  /// the result is checked for NaN/Inf.
  Tensor<T> record(const char* op, Shape shape, std::vector<T> value,
                   std::initializer_list<Tensor<T>> parents, BackwardFn backward);
  Tensor<T> record(const char* op, Shape shape, std::vector<T> value,
                   const std::vector<Tensor<T>>& parents, BackwardFn backward);

  void backward(const Tensor<T>& loss);
  bool backward_done() const { return done_; }

  Node& node(std::size_t id) { return nodes_[id]; }
  const Node& node(std::size_t id) const { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }

  /// Gradient buffer of `id`, allocated on first use.
  std::vector<T>& grad_buffer(std::size_t id);

 private:
  std::vector<Node> nodes_;
  bool done_ = false;
};

// Ops. All inputs must live on the same tape; none mutates its inputs.
// Matrices are row-major 2-D tensors.

template <class T> Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);
/// a * b^T
template <class T> Tensor<T> matmul_nt(const Tensor<T>& a, const Tensor<T>& b);
template <class T> Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <class T> Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <class T> Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
/// Adds a 1 x c row to every row of an r x c matrix.
template <class T> Tensor<T> add_bias(const Tensor<T>& a, const Tensor<T>& bias);
template <class T> Tensor<T> scale(const Tensor<T>& a, T factor);
template <class T> Tensor<T> add_scalar(const Tensor<T>& a, T value);
template <class T> Tensor<T> relu(const Tensor<T>& a);
template <class T> Tensor<T> exp(const Tensor<T>& a);
/// Concatenates along the last dimension.
template <class T> Tensor<T> concat(const std::vector<Tensor<T>>& parts);
template <class T> Tensor<T> concat_rows(const std::vector<Tensor<T>>& parts);
template <class T> Tensor<T> slice_cols(const Tensor<T>& a, std::size_t start, std::size_t len);
template <class T> Tensor<T> reshape(const Tensor<T>& a, Shape shape);
template <class T> Tensor<T> row_softmax(const Tensor<T>& a);
/// Per-row normalisation with affine gamma/beta (1 x c each).
template <class T>
Tensor<T> layer_norm(const Tensor<T>& a, const Tensor<T>& gamma, const Tensor<T>& beta,
                     T eps = T(1e-5));
/// Mean over rows: r x c -> 1 x c.
template <class T> Tensor<T> mean_pool(const Tensor<T>& a);
template <class T> Tensor<T> gather_rows(const Tensor<T>& a, std::vector<std::uint32_t> index);
/// Sums row ranges [offsets[s], offsets[s+1]) into row s.
template <class T>
Tensor<T> segment_sum(const Tensor<T>& a, std::vector<std::uint32_t> offsets);
template <class T> Tensor<T> sum(const Tensor<T>& a);
/// Mean of squared differences over all elements.
template <class T> Tensor<T> mse(const Tensor<T>& a, const Tensor<T>& b);
/// Row-wise cosine similarity: r x c, r x c -> r x 1.
template <class T> Tensor<T> cosine_similarity(const Tensor<T>& a, const Tensor<T>& b);
/// Row-wise log(sum(exp(x))): r x c -> r x 1.
template <class T> Tensor<T> log_sum_exp(const Tensor<T>& a);

}  // namespace gfse::ad
