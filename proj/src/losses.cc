#include "gfse/losses.h"

#include <algorithm>
#include <cmath>

namespace gfse {

PairList connected_pairs(const SpdLabel& spd) {
  PairList p;
  for (std::uint32_t i = 0; i < spd.n; ++i)
    for (std::uint32_t j = i + 1; j < spd.n; ++j)
      if (spd(i, j) != kUnreachable) {
        p.i.push_back(i);
        p.j.push_back(j);
      }
  return p;
}

PairList sample_spd_pairs(const SpdLabel& spd, std::size_t count, std::mt19937_64& rng) {
  auto all = connected_pairs(spd);
  if (count >= all.size()) return all;
  std::vector<std::size_t> idx(all.size());
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  PairList p;
  for (auto k : idx) {
    p.i.push_back(all.i[k]);
    p.j.push_back(all.j[k]);
  }
  return p;
}

std::vector<double> spd_targets(const SpdLabel& spd, const PairList& pairs) {
  std::vector<double> t;
  t.reserve(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    int d = spd(pairs.i[k], pairs.j[k]);
    if (d == kUnreachable)
      throw LossError("spd pair (" + std::to_string(pairs.i[k]) + ", " + std::to_string(pairs.j[k]) +
                      ") is disconnected");
    t.push_back(static_cast<double>(d) / spd.component_diameter[pairs.i[k]]);
  }
  return t;
}

template <class T>
ad::Tensor<T> loss_spd(const ad::Tensor<T>& pred, const std::vector<double>& targets) {
  if (targets.empty()) throw LossError("spd loss: empty pair set");
  if (pred.size() != targets.size())
    throw ad::ShapeError("spd loss: " + std::to_string(pred.size()) + " predictions for " +
                         std::to_string(targets.size()) + " targets");
  auto y = pred.tape()->constant(pred.shape(), std::vector<T>(targets.begin(), targets.end()));
  return ad::mse(pred, y);
}

template <class T>
ad::Tensor<T> loss_motif(const ad::Tensor<T>& pred, const MotifLabel& label) {
  if (pred.shape().size() != 2 || pred.cols() != label.k)
    throw LossError("motif loss: prediction " + ad::shape_str(pred.shape()) + " vs catalog k=" +
                    std::to_string(label.k));
  if (pred.rows() != label.n)
    throw ad::ShapeError("motif loss: " + std::to_string(pred.rows()) + " rows for " +
                         std::to_string(label.n) + " nodes");
  std::vector<T> y(label.counts.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<T>(std::log1p(static_cast<double>(label.counts[i])));
  auto diff = ad::sub(pred, pred.tape()->constant(pred.shape(), std::move(y)));
  return ad::scale(ad::sum(ad::mul(diff, diff)), T(1) / static_cast<T>(label.n));
}

CdPairs sample_cd_pairs(const CommunityLabel& c, std::mt19937_64& rng) {
  CdPairs out;
  PairList inter;
  auto n = static_cast<std::uint32_t>(c.assignment.size());
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j) {
      if (c.assignment[i] == c.assignment[j]) {
        out.pairs.i.push_back(i);
        out.pairs.j.push_back(j);
        out.same.push_back(1);
      } else {
        inter.i.push_back(i);
        inter.j.push_back(j);
      }
    }
  std::size_t want = std::min(out.pairs.size(), inter.size());
  if (out.pairs.size() == 0) want = inter.size();
  std::vector<std::size_t> idx(inter.size());
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(want);
  std::sort(idx.begin(), idx.end());
  for (auto k : idx) {
    out.pairs.i.push_back(inter.i[k]);
    out.pairs.j.push_back(inter.j[k]);
    out.same.push_back(0);
  }
  return out;
}

template <class T>
ad::Tensor<T> loss_cd(const ad::Tensor<T>& z, const CdPairs& pairs, double margin) {
  if (pairs.pairs.size() == 0) throw LossError("cd loss: empty pair set");
  auto& tape = *z.tape();
  auto sim = ad::cosine_similarity(ad::gather_rows(z, pairs.pairs.i), ad::gather_rows(z, pairs.pairs.j));
  std::size_t m = pairs.same.size();
  std::vector<T> y(m), ny(m);
  for (std::size_t k = 0; k < m; ++k) {
    y[k] = pairs.same[k] ? T(1) : T(0);
    ny[k] = T(1) - y[k];
  }
  auto pull = ad::mul(ad::add_scalar(ad::scale(sim, T(-1)), T(1)), tape.constant({m, 1}, std::move(y)));
  auto push = ad::mul(ad::relu(ad::add_scalar(sim, static_cast<T>(margin - 1.0))), tape.constant({m, 1}, std::move(ny)));
  return ad::scale(ad::sum(ad::add(pull, push)), T(1) / static_cast<T>(m));
}

template <class T>
ad::Tensor<T> loss_gcl(const ad::Tensor<T>& z, const std::vector<std::uint32_t>& tags, const GclOptions& opt,
                       std::mt19937_64& rng) {
  if (z.rows() != tags.size())
    throw ad::ShapeError("gcl loss: " + std::to_string(z.rows()) + " embeddings for " +
                         std::to_string(tags.size()) + " tags");
  T inv_tau = static_cast<T>(1.0 / opt.tau);
  auto b = static_cast<std::uint32_t>(tags.size());
  std::vector<ad::Tensor<T>> terms;
  std::size_t count = 0;
  for (std::uint32_t a = 0; a < b; ++a) {
    std::vector<std::uint32_t> pos, neg;
    for (std::uint32_t k = 0; k < b; ++k) {
      if (k == a) continue;
      (tags[k] == tags[a] ? pos : neg).push_back(k);
    }
    if (pos.empty() || neg.empty()) continue;
    if (neg.size() > opt.negatives) {
      std::shuffle(neg.begin(), neg.end(), rng);
      neg.resize(opt.negatives);
      std::sort(neg.begin(), neg.end());
    }
    auto sp = ad::cosine_similarity(ad::gather_rows(z, std::vector<std::uint32_t>(pos.size(), a)),
                                    ad::gather_rows(z, pos));
    auto sn = ad::cosine_similarity(ad::gather_rows(z, std::vector<std::uint32_t>(neg.size(), a)),
                                    ad::gather_rows(z, neg));
    auto sn_rows = ad::gather_rows(ad::reshape(sn, {1, neg.size()}), std::vector<std::uint32_t>(pos.size(), 0));
    auto logits = opt.include_positive ? ad::concat<T>({sp, sn_rows}) : sn_rows;
    terms.push_back(ad::sub(ad::log_sum_exp(ad::scale(logits, inv_tau)), ad::scale(sp, inv_tau)));
    count += pos.size();
  }
  if (terms.empty()) throw LossError("gcl loss: no anchor has both a positive and a negative");
  return ad::scale(ad::sum(ad::concat_rows(terms)), T(1) / static_cast<T>(count));
}

template <class T>
ad::Tensor<T> combined_loss(const std::array<ad::Tensor<T>, kNumTasks>& losses, const ad::Tensor<T>& s) {
  if (s.size() != kNumTasks) throw ad::ShapeError("combined loss: expected 4 uncertainty parameters, got " + ad::shape_str(s.shape()));
  std::vector<ad::Tensor<T>> parts;
  for (const auto& l : losses) parts.push_back(ad::reshape(l, {1, 1}));
  auto l = ad::concat(parts);
  auto weighted = ad::sum(ad::mul(ad::exp(ad::scale(ad::reshape(s, {1, kNumTasks}), T(-1))), l));
  return ad::add(weighted, ad::scale(ad::sum(s), T(0.5)));
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0, aa = 0, bb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    aa += a[k] * a[k];
    bb += b[k] * b[k];
  }
  if (aa == 0.0 || bb == 0.0) throw LossError("cosine of a zero-norm embedding");
  return dot / (std::sqrt(aa) * std::sqrt(bb));
}

namespace {

double pair_accuracy(std::span<const double> z, std::size_t dim, std::span<const std::uint32_t> group,
                     double threshold) {
  std::size_t n = group.size();
  if (z.size() != n * dim) throw ad::ShapeError("metric: embedding size does not match label count");
  std::size_t total = 0, correct = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      bool pred = cosine(z.subspan(i * dim, dim), z.subspan(j * dim, dim)) >= threshold;
      correct += pred == (group[i] == group[j]);
      ++total;
    }
  return total ? static_cast<double>(correct) / static_cast<double>(total) : 1.0;
}

}  // namespace

double acc_cd(std::span<const double> z, std::size_t dim, std::span<const std::uint32_t> assignment) {
  return pair_accuracy(z, dim, assignment, 0.5);
}

double acc_gcl(std::span<const double> z, std::size_t dim, std::span<const std::uint32_t> tags) {
  return pair_accuracy(z, dim, tags, 0.0);
}

double mean_squared_error(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size() || pred.empty()) throw ad::ShapeError("mse: size mismatch or empty");
  double s = 0;
  for (std::size_t k = 0; k < pred.size(); ++k) s += (pred[k] - target[k]) * (pred[k] - target[k]);
  return s / static_cast<double>(pred.size());
}

double mae_mc(std::span<const double> pred, const MotifLabel& label) {
  if (pred.size() != label.counts.size()) throw LossError("mae_mc: prediction size does not match label");
  double s = 0;
  for (std::size_t k = 0; k < pred.size(); ++k)
    s += std::abs(std::expm1(pred[k]) - static_cast<double>(label.counts[k]));
  return s / static_cast<double>(label.n);
}

#define GFSE_INSTANTIATE(T)                                                                           \
  template ad::Tensor<T> loss_spd(const ad::Tensor<T>&, const std::vector<double>&);                  \
  template ad::Tensor<T> loss_motif(const ad::Tensor<T>&, const MotifLabel&);                         \
  template ad::Tensor<T> loss_cd(const ad::Tensor<T>&, const CdPairs&, double);                       \
  template ad::Tensor<T> loss_gcl(const ad::Tensor<T>&, const std::vector<std::uint32_t>&,            \
                                  const GclOptions&, std::mt19937_64&);                               \
  template ad::Tensor<T> combined_loss(const std::array<ad::Tensor<T>, kNumTasks>&, const ad::Tensor<T>&);

GFSE_INSTANTIATE(float)
GFSE_INSTANTIATE(double)

}  // namespace gfse
