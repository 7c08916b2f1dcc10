#include "gfse/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gfse/rng.h"

namespace gfse::ad {

double relative_error(double analytic, double numeric, double floor) {
  double den = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / den;
}

GradcheckReport gradcheck(ParamSet<double>& params, const LossFn& loss, const GradcheckOptions& opt) {
  std::vector<std::vector<double>> analytic;
  {
    Tape<double> tape;
    auto bound = params.bind(tape, true);
    tape.backward(loss(tape, bound));
    analytic = collect_grads(bound);
  }
  auto eval = [&] {
    Tape<double> tape;
    return loss(tape, params.bind(tape, false)).item();
  };

  GradcheckReport rep;
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& value = params[p].value;
    std::vector<std::size_t> idx(value.size());
    std::iota(idx.begin(), idx.end(), 0);
    if (idx.size() > opt.max_entries) {
      std::mt19937_64 rng(mix_seed(opt.seed, p));
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(opt.max_entries);
    }
    for (std::size_t k : idx) {
      double orig = value[k];
      value[k] = orig + opt.eps;
      double up = eval();
      value[k] = orig - opt.eps;
      double down = eval();
      value[k] = orig;
      double numeric = (up - down) / (2.0 * opt.eps);
      double err = relative_error(analytic[p][k], numeric, opt.floor);
      ++rep.checked;
      if (rep.worst.empty() || err > rep.max_rel_error) {
        rep.max_rel_error = err;
        rep.worst = params[p].name + "[" + std::to_string(k) + "]";
        rep.worst_analytic = analytic[p][k];
        rep.worst_numeric = numeric;
      }
    }
  }
  return rep;
}

}  // namespace gfse::ad
