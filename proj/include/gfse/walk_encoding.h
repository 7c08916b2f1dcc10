#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "gfse/graph.h"

namespace gfse {

/// Exact reduced fraction. mpq_class keeps the canonical form after every
/// arithmetic operation.
using Rational = mpq_class;

/// "num/den" in lowest terms, denominator always written.
std::string to_fraction_string(const Rational& q);

class WalkEncodingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PseMode { kExact, kFloat };

/// values(i, k) = (M^k)[i][i] for k = 0..d-1.
template <class T>
struct NodePse {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<T> values;

  T& operator()(std::size_t i, std::size_t k) { return values[i * d + k]; }
  const T& operator()(std::size_t i, std::size_t k) const { return values[i * d + k]; }
};

/// values(i, j, k) = (M^k)[i][j]; layout is [i][j][k].
template <class T>
struct RelPse {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<T> values;

  T& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return values[(i * n + j) * d + k];
  }
  const T& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return values[(i * n + j) * d + k];
  }
};

/// Throws WalkEncodingError naming the first degree-0 node.
void require_no_isolated_nodes(const Graph& g);

/// M = D^-1 A, row-major n x n.
std::vector<Rational> random_walk_matrix_exact(const Graph& g);
std::vector<double> random_walk_matrix(const Graph& g);

// Exact mode. Powers are carried as integer numerators over a common
// denominator lcm(deg)^k and reduced on output.
NodePse<Rational> node_rw_encoding_exact(const Graph& g, std::size_t d);
RelPse<Rational> relative_rw_encoding_exact(const Graph& g, std::size_t d);

// Float mode. The parallel kernels split over walk sources; each entry is
// accumulated in ascending neighbor order, so results do not depend on the
// thread count. The *_serial variants are the single-threaded reference.
NodePse<double> node_rw_encoding(const Graph& g, std::size_t d);
RelPse<double> relative_rw_encoding(const Graph& g, std::size_t d);
RelPse<double> relative_rw_encoding_serial(const Graph& g, std::size_t d);

/// Diagonal slice of a relative encoding.
template <class T>
NodePse<T> diagonal(const RelPse<T>& r) {
  NodePse<T> p{r.n, r.d, std::vector<T>(r.n * r.d)};
  for (std::size_t i = 0; i < r.n; ++i)
    for (std::size_t k = 0; k < r.d; ++k) p(i, k) = r(i, i, k);
  return p;
}

/// CSV with n rows and d columns; "%.12g" for floats, "num/den" for exact.
std::string node_pse_csv(const NodePse<double>& p);
std::string node_pse_csv(const NodePse<Rational>& p);

}  // namespace gfse
