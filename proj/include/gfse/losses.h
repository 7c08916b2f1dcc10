#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "gfse/labels.h"
#include "gfse/tensor.h"

namespace gfse {

enum Task : std::size_t { kTaskSpd, kTaskMc, kTaskCd, kTaskGcl, kNumTasks };

class LossError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PairList {
  std::vector<std::uint32_t> i, j;
  std::size_t size() const { return i.size(); }
};

/// Unordered connected pairs i < j in row-major order.
PairList connected_pairs(const SpdLabel& spd);
/// Uniform sample of min(count, all) connected pairs, kept in row-major order.
PairList sample_spd_pairs(const SpdLabel& spd, std::size_t count, std::mt19937_64& rng);
/// dist(i, j) / diameter of the component; throws for unreachable pairs.
std::vector<double> spd_targets(const SpdLabel& spd, const PairList& pairs);

/// Mean squared error of m x 1 predictions against normalised distances.
template <class T>
ad::Tensor<T> loss_spd(const ad::Tensor<T>& pred, const std::vector<double>& targets);

/// (1/n) sum_i ||pred_i - log(1 + count_i)||^2 for n x k predictions.
template <class T>
ad::Tensor<T> loss_motif(const ad::Tensor<T>& pred, const MotifLabel& label);

struct CdPairs {
  PairList pairs;
  std::vector<std::uint8_t> same;  // 1 for intra-community pairs
};

/// All intra-community pairs plus as many sampled inter-community pairs.
CdPairs sample_cd_pairs(const CommunityLabel& c, std::mt19937_64& rng);

/// Mean over pairs of y(1 - sim) + (1 - y) max(0, margin - (1 - sim)).
template <class T>
ad::Tensor<T> loss_cd(const ad::Tensor<T>& z, const CdPairs& pairs, double margin);

struct GclOptions {
  double tau = 0.1;
  std::size_t negatives = 16;  // K
  /// Adds the positive term to the softmax denominator.
  bool include_positive = false;
};

/// InfoNCE over graph embeddings (B x d_z) where graphs sharing a tag are
/// positives. Averaged over all (anchor, positive) pairs; each anchor uses
/// at most K negatives drawn from `rng`.
template <class T>
ad::Tensor<T> loss_gcl(const ad::Tensor<T>& z, const std::vector<std::uint32_t>& tags,
                       const GclOptions& opt, std::mt19937_64& rng);

/// sum_t exp(-s_t) L_t + sum_t s_t / 2, with `s` of shape 1 x 4.
template <class T>
ad::Tensor<T> combined_loss(const std::array<ad::Tensor<T>, kNumTasks>& losses, const ad::Tensor<T>& s);

// Metrics on raw predictions.

double cosine(std::span<const double> a, std::span<const double> b);
/// Fraction of pairs i < j where (cos >= 0.5) matches same-community.
double acc_cd(std::span<const double> z, std::size_t dim, std::span<const std::uint32_t> assignment);
/// Fraction of graph pairs where (cos >= 0) matches same-tag.
double acc_gcl(std::span<const double> z, std::size_t dim, std::span<const std::uint32_t> tags);
double mean_squared_error(std::span<const double> pred, std::span<const double> target);
/// Mean over nodes of the L1 error in raw count space; `pred` holds
/// log(1 + count) estimates.
double mae_mc(std::span<const double> pred, const MotifLabel& label);

}  // namespace gfse
