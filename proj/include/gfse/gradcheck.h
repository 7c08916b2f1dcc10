#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>

#include "gfse/optim.h"

namespace gfse::ad {

struct GradcheckOptions {
  double eps = 1e-5;
  /// Denominator floor for the relative error |a - n| / max(|a|, |n|, floor).
  double floor = 1e-5;
  /// Entries checked per parameter; the rest are skipped (sampled by seed).
  std::size_t max_entries = std::numeric_limits<std::size_t>::max();
  std::uint64_t seed = 0;
};

struct GradcheckReport {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::string worst;  // "name[index]"
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

using LossFn = std::function<Tensor<double>(Tape<double>&, const std::vector<Tensor<double>>&)>;

double relative_error(double analytic, double numeric, double floor);

/// Central-difference check of the gradient of `loss` with respect to every
/// parameter in `params`. `params` is restored before returning.
GradcheckReport gradcheck(ParamSet<double>& params, const LossFn& loss,
                          const GradcheckOptions& opt = {});

}  // namespace gfse::ad
