#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfse/checkpoint.h"
#include "gfse/config.h"
#include "gfse/corpus.h"
#include "gfse/losses.h"
#include "gfse/model.h"

namespace gfse {

class TrainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One metrics-log line. Losses and metrics are measured on the validation
/// split; epoch 0 is the untrained model.
struct EpochMetrics {
  std::size_t epoch = 0;
  double loss_total = 0;
  std::array<double, kNumTasks> loss{};
  std::array<double, kNumTasks> sigma2{};
  double acc_cd = 0, acc_gcl = 0, mse_spd = 0, mae_mc = 0;

  std::string json() const;
  static EpochMetrics from_json(std::string_view line);
};

std::vector<EpochMetrics> read_metrics_log(const std::filesystem::path& path);

struct TrainOptions {
  std::optional<std::filesystem::path> checkpoint_out;  // rewritten after every epoch
  std::optional<std::filesystem::path> log_out;         // JSON lines, rewritten after every epoch
  std::optional<std::filesystem::path> resume_from;
  std::function<void(const EpochMetrics&)> on_epoch;
};

template <class T>
struct TrainResult {
  GfseModel<T> model;
  std::vector<EpochMetrics> log;
  bool early_stopped = false;
  std::uint64_t steps = 0;
};

/// Train / validation index split, stratified by tag and seeded.
struct Split {
  std::vector<std::size_t> train, val;
};
Split split_corpus(const Corpus& corpus, double val_fraction, std::uint64_t seed);

/// Batches holding an equal share of every family (at least two graphs each).
std::vector<std::vector<std::size_t>> make_batches(const Corpus& corpus, const std::vector<std::size_t>& pool,
                                                   std::size_t batch_size, std::mt19937_64& rng);

/// Minimises the uncertainty-weighted sum of the four task losses with
/// Adam and early stopping on the validation loss. Deterministic for a fixed
/// seed and corpus.
template <class T>
TrainResult<T> train(const TrainConfig& cfg, const Corpus& corpus, const TrainOptions& opt = {});

/// Validation-style evaluation of `model` on `indices`.
template <class T>
EpochMetrics evaluate(const GfseModel<T>& model, const TrainConfig& cfg, const Corpus& corpus,
                      const std::vector<std::size_t>& indices);

/// Node encodings as CSV (n rows, out_dim columns, round-trip precision).
/// The forward pass runs in f64 whatever the model dtype.
template <class T>
std::string export_pse(const GfseModel<T>& model, const Graph& g);

/// Dense numeric CSV; an empty line is a row with zero columns.
std::vector<std::vector<double>> parse_matrix_csv(std::string_view text);
std::string matrix_csv(const std::vector<std::vector<double>>& rows);
/// Row-wise concatenation, `x` columns first.
std::vector<std::vector<double>> augment_features(const std::vector<std::vector<double>>& x,
                                                  const std::vector<std::vector<double>>& pse);

}  // namespace gfse
