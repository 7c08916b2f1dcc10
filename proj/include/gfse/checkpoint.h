#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gfse/model.h"

namespace gfse {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Trainer state needed to continue a run at an epoch boundary.
struct ResumeState {
  std::string train_json;  // trainer bookkeeping (best loss, patience, config)
  std::uint64_t adam_step = 0;
  std::vector<std::vector<double>> m, v;  // per parameter, ParamSet order
};

template <class T>
struct Checkpoint {
  GfseConfig config;
  ad::ParamSet<T> params;  // includes the uncertainty parameters "unc.s"
  std::uint64_t step = 0;
  std::uint64_t epoch = 0;
  std::optional<ResumeState> resume;
};

template <class T>
std::string serialize_checkpoint(const Checkpoint<T>& ckpt);
template <class T>
Checkpoint<T> parse_checkpoint(std::string_view bytes);

/// "f32" or "f64" from the config header.
std::string checkpoint_dtype(std::string_view bytes);

template <class T>
void save_checkpoint(const std::filesystem::path& path, const Checkpoint<T>& ckpt);
template <class T>
Checkpoint<T> load_checkpoint(const std::filesystem::path& path);

}  // namespace gfse
