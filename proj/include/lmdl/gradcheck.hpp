#pragma once

#include <cstdint>
#include <string>

namespace lmdl {

struct GradCheckConfig {
  int dim = 5;
  int rank = 3;
  int prototypes = 4;
  int trials = 200;
  double beta = 10.0;
  double step = 1e-5;       // central-difference step
  std::uint64_t seed = 0;
  bool corrupt = false;     // negative-control hook: perturb one analytic entry
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  int worst_trial = -1;
  std::string worst_block;
};

/// Compares the analytic per-sample gradients against central finite
/// differences of the sigmoid loss on random instances, with the
/// same/different-class assignment frozen during differencing. The relative
/// error of an entry is |a - f| / max(|a|, |f|, 1e-6).
GradCheckResult gradient_check(const GradCheckConfig& cfg);

}  // namespace lmdl
