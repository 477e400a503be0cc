#pragma once

#include <cstdint>

#include "phenogen/nn/tensor.h"

namespace phenogen::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Moment accumulators mirror the shapes of the parameters they were
/// created for.
struct AdamState {
  AdamConfig config;
  ParamStore m;
  ParamStore v;
  std::int64_t step = 0;

  explicit AdamState(AdamConfig cfg = {}) : config(cfg) {}
};

/// One bias-corrected Adam update of every parameter named in `grads`.
/// Names in `params` without a gradient entry are left untouched. Throws
/// Error{kNonFinite} before modifying anything if a gradient is not finite,
/// and Error{kShapeMismatch} on shape disagreement.
void adam_step(ParamStore& params, const ParamStore& grads, AdamState& state);

}  // namespace phenogen::nn
