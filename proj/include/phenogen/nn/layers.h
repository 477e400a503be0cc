#pragma once

#include <random>
#include <vector>

#include "phenogen/nn/ops.h"
#include "phenogen/nn/tensor.h"

namespace phenogen::nn {

enum class Activation { kIdentity, kTanh, kRelu };

Var activate(Var x, Activation act);

/// GRU cell weights on a tape. W* are H×in, U* are H×H, b* are 1×H.
struct GruVars {
  Var wz, wr, wh;
  Var uz, ur, uh;
  Var bz, br, bh;
};

/// z = σ(Wz x + Uz h + bz), r = σ(Wr x + Ur h + br),
/// h̃ = tanh(Wh x + Uh (r⊙h) + bh), h' = (1−z)⊙h̃ + z⊙h.
Var gru_step(const GruVars& p, Var x, Var h);

struct DenseVars {
  Var w;  // out×in
  Var b;  // 1×out
  Activation act = Activation::kIdentity;
};

Var ffn_forward(const std::vector<DenseVars>& layers, Var x);

/// Inverted dropout: zeroes entries with probability p and rescales the
/// survivors by 1/(1−p). Identity when p == 0.
Var dropout(Var x, double p, std::mt19937_64& rng);

// Tape-free conveniences for inference and for testing the cell formulas.

struct GruParams {
  Tensor wz, wr, wh;
  Tensor uz, ur, uh;
  Tensor bz, br, bh;

  static GruParams zeros(int input, int hidden);
  int hidden() const noexcept { return uz.rows(); }
  int input() const noexcept { return wz.cols(); }
  /// Throws Error{kShapeMismatch} unless every gate agrees on sizes.
  void validate() const;
  GruVars bind(Tape& tape, GruParams* grads = nullptr) const;
};

Tensor gru_step(const GruParams& p, const Tensor& x, const Tensor& h);

struct DenseLayer {
  Tensor w;
  Tensor b;
  Activation act = Activation::kIdentity;
};

Tensor ffn_forward(const std::vector<DenseLayer>& layers, const Tensor& x);
Tensor log_softmax(const Tensor& logits);

}  // namespace phenogen::nn
