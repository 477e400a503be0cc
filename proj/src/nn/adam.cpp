#include "phenogen/nn/adam.h"

#include <cmath>

#include "phenogen/error.h"

namespace phenogen::nn {

void adam_step(ParamStore& params, const ParamStore& grads, AdamState& state) {
  for (const auto& [name, g] : grads) {
    auto it = params.find(name);
    if (it == params.end()) throw Error(Errc::kShapeMismatch, "gradient for unknown parameter " + name);
    if (!it->second.same_shape(g)) throw Error(Errc::kShapeMismatch, "gradient shape differs for " + name);
    if (!g.all_finite()) throw Error(Errc::kNonFinite, "non-finite gradient for " + name);
  }
  const AdamConfig& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (const auto& [name, g] : grads) {
    Tensor& p = params.at(name);
    Tensor& m = state.m.try_emplace(name, g.rows(), g.cols()).first->second;
    Tensor& v = state.v.try_emplace(name, g.rows(), g.cols()).first->second;
    for (std::size_t i = 0; i < g.size(); ++i) {
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p[i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
    }
  }
}

}  // namespace phenogen::nn
