#pragma once

#include <functional>
#include <string>

#include "gssl/optim.hpp"
#include "gssl/tape.hpp"

namespace gssl {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  int worst_index = -1;
  int trials = 0;
};

struct GradCheckOptions {
  int n_trials = 3;
  uint64_t seed = 1;
  double fd_h = 1e-3;
  // Relative error uses denominator max(|analytic|, |fd|, floor). The floor
  // absorbs float32 round-off in the central differences; with losses of
  // magnitude O(1) the FD noise floor sits near eps32*|f|/h ~= 1e-4, so a
  // 0.25 floor keeps the 1e-3 tolerance meaningful without false alarms.
  double denom_floor = 0.25;
  // When true each trial re-randomizes parameter values uniform(-0.5, 0.5);
  // otherwise the caller's initial values are used for a single pass.
  bool randomize_params = true;
};

// Compares tape gradients against central finite differences, elementwise,
// for every parameter in `params`. `build` must rebuild the same scalar loss
// from the current parameter values (fix any seeds inside the closure).
GradCheckReport grad_check(const std::function<Value(Tape&)>& build, ParamStore& params,
                           const GradCheckOptions& opt = {});

}  // namespace gssl
