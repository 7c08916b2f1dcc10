#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "gfse/corpus.h"
#include "gfse/model.h"

namespace gfse {

struct TrainConfig {
  GfseConfig model;
  CorpusSpec corpus;
  double lr = 1e-3;
  std::size_t batch_size = 16;
  std::size_t max_epochs = 30;
  std::size_t patience = 10;
  double tau = 0.1;
  double margin = 1.0;
  std::size_t spd_pairs_per_node = 4;
  std::size_t gcl_negatives = 16;
  bool gcl_include_positive = false;
  double val_fraction = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

// JSON round trips. Missing keys keep their defaults; unknown keys throw
// ConfigError.
nlohmann::json to_json(const GfseConfig& c);
nlohmann::json to_json(const CorpusSpec& c);
nlohmann::json to_json(const TrainConfig& c);
GfseConfig model_config_from_json(const nlohmann::json& j);
CorpusSpec corpus_spec_from_json(const nlohmann::json& j);
TrainConfig train_config_from_json(const nlohmann::json& j);
TrainConfig read_train_config(const std::filesystem::path& path);

}  // namespace gfse
