#include "gfse/walk_encoding.h"

#include <cstdio>
#include <numeric>

namespace gfse {
namespace {

void check_steps(std::size_t d) {
  if (d == 0) throw WalkEncodingError("walk encoding needs d >= 1");
}

// Writes the d walk distributions started at `source` into out[(j*d)+k].
void walk_from_source(const Graph& g, NodeId source, std::size_t d,
                      std::vector<double>& cur, std::vector<double>& next,
                      double* out) {
  std::size_t n = g.num_nodes();
  std::fill(cur.begin(), cur.end(), 0.0);
  cur[source] = 1.0;
  for (std::size_t k = 0;; ++k) {
    for (std::size_t j = 0; j < n; ++j) out[j * d + k] = cur[j];
    if (k + 1 == d) break;
    for (NodeId j = 0; j < n; ++j) {
      double acc = 0.0;
      for (NodeId l : g.neighbors(j)) acc += cur[l] / static_cast<double>(g.degree(l));
      next[j] = acc;
    }
    std::swap(cur, next);
  }
}

void walk_from_source_exact(const Graph& g, NodeId source, std::size_t d,
                            const std::vector<mpz_class>& scale,
                            const std::vector<mpz_class>& denom, Rational* out) {
  std::size_t n = g.num_nodes();
  std::vector<mpz_class> cur(n, 0), next(n);
  cur[source] = 1;
  for (std::size_t k = 0;; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      Rational& q = out[j * d + k];
      q.get_num() = cur[j];
      q.get_den() = denom[k];
      q.canonicalize();
    }
    if (k + 1 == d) break;
    for (NodeId j = 0; j < n; ++j) {
      mpz_class acc = 0;
      for (NodeId l : g.neighbors(j)) acc += cur[l] * scale[l];
      next[j] = std::move(acc);
    }
    std::swap(cur, next);
  }
}

}  // namespace

std::string to_fraction_string(const Rational& q) {
  Rational r = q;
  r.canonicalize();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

void require_no_isolated_nodes(const Graph& g) {
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (g.degree(v) == 0)
      throw WalkEncodingError("random walk undefined: node " + std::to_string(v) +
                              " is isolated");
}

std::vector<Rational> random_walk_matrix_exact(const Graph& g) {
  require_no_isolated_nodes(g);
  std::size_t n = g.num_nodes();
  std::vector<Rational> m(n * n, 0);
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j : g.neighbors(i)) m[i * n + j] = Rational(1, g.degree(i));
  return m;
}

std::vector<double> random_walk_matrix(const Graph& g) {
  require_no_isolated_nodes(g);
  std::size_t n = g.num_nodes();
  std::vector<double> m(n * n, 0.0);
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j : g.neighbors(i)) m[i * n + j] = 1.0 / static_cast<double>(g.degree(i));
  return m;
}

RelPse<Rational> relative_rw_encoding_exact(const Graph& g, std::size_t d) {
  check_steps(d);
  require_no_isolated_nodes(g);
  std::size_t n = g.num_nodes();
  mpz_class lcm = 1;
  for (NodeId v = 0; v < n; ++v) mpz_lcm_ui(lcm.get_mpz_t(), lcm.get_mpz_t(), g.degree(v));
  std::vector<mpz_class> scale(n);
  for (NodeId v = 0; v < n; ++v) scale[v] = lcm / static_cast<unsigned long>(g.degree(v));
  std::vector<mpz_class> denom(d);
  denom[0] = 1;
  for (std::size_t k = 1; k < d; ++k) denom[k] = denom[k - 1] * lcm;

  RelPse<Rational> r{n, d, std::vector<Rational>(n * n * d)};
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
    walk_from_source_exact(g, static_cast<NodeId>(i), d, scale, denom,
                           r.values.data() + static_cast<std::size_t>(i) * n * d);
  return r;
}

NodePse<Rational> node_rw_encoding_exact(const Graph& g, std::size_t d) {
  return diagonal(relative_rw_encoding_exact(g, d));
}

RelPse<double> relative_rw_encoding_serial(const Graph& g, std::size_t d) {
  check_steps(d);
  require_no_isolated_nodes(g);
  std::size_t n = g.num_nodes();
  RelPse<double> r{n, d, std::vector<double>(n * n * d)};
  std::vector<double> cur(n), next(n);
  for (NodeId i = 0; i < n; ++i)
    walk_from_source(g, i, d, cur, next, r.values.data() + i * n * d);
  return r;
}

RelPse<double> relative_rw_encoding(const Graph& g, std::size_t d) {
  check_steps(d);
  require_no_isolated_nodes(g);
  std::size_t n = g.num_nodes();
  RelPse<double> r{n, d, std::vector<double>(n * n * d)};
#pragma omp parallel
  {
    std::vector<double> cur(n), next(n);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
      walk_from_source(g, static_cast<NodeId>(i), d, cur, next,
                       r.values.data() + static_cast<std::size_t>(i) * n * d);
  }
  return r;
}

NodePse<double> node_rw_encoding(const Graph& g, std::size_t d) {
  return diagonal(relative_rw_encoding(g, d));
}

std::string node_pse_csv(const NodePse<double>& p) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < p.n; ++i) {
    for (std::size_t k = 0; k < p.d; ++k) {
      if (k) out += ',';
      std::snprintf(buf, sizeof buf, "%.12g", p(i, k));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::string node_pse_csv(const NodePse<Rational>& p) {
  std::string out;
  for (std::size_t i = 0; i < p.n; ++i) {
    for (std::size_t k = 0; k < p.d; ++k) {
      if (k) out += ',';
      out += to_fraction_string(p(i, k));
    }
    out += '\n';
  }
  return out;
}

}  // namespace gfse
