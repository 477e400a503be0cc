#include "phenogen/nn/layers.h"

#include <cmath>

#include "phenogen/error.h"

namespace phenogen::nn {

Var activate(Var x, Activation act) {
  switch (act) {
    case Activation::kTanh: return tanh(x);
    case Activation::kRelu: return relu(x);
    case Activation::kIdentity: break;
  }
  return x;
}

Var gru_step(const GruVars& p, Var x, Var h) {
  Var z = sigmoid(add(linear(x, p.wz, p.bz), matmul_t(h, p.uz)));
  Var r = sigmoid(add(linear(x, p.wr, p.br), matmul_t(h, p.ur)));
  Var cand = tanh(add(linear(x, p.wh, p.bh), matmul_t(mul(r, h), p.uh)));
  return add(mul(one_minus(z), cand), mul(z, h));
}

Var ffn_forward(const std::vector<DenseVars>& layers, Var x) {
  for (const auto& l : layers) x = activate(linear(x, l.w, l.b), l.act);
  return x;
}

Var dropout(Var x, double p, std::mt19937_64& rng) {
  if (p <= 0.0) return x;
  if (p >= 1.0) throw Error(Errc::kInvalidArgument, "dropout rate must be below 1");
  std::bernoulli_distribution keep(1.0 - p);
  Tensor mask(x.rows(), x.cols());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = keep(rng) ? 1.0 / (1.0 - p) : 0.0;
  return mul(x, x.tape()->constant(std::move(mask)));
}

GruParams GruParams::zeros(int input, int hidden) {
  GruParams p;
  for (Tensor* w : {&p.wz, &p.wr, &p.wh}) *w = Tensor(hidden, input);
  for (Tensor* u : {&p.uz, &p.ur, &p.uh}) *u = Tensor(hidden, hidden);
  for (Tensor* b : {&p.bz, &p.br, &p.bh}) *b = Tensor(1, hidden);
  return p;
}

void GruParams::validate() const {
  const int h = hidden(), in = input();
  for (const Tensor* w : {&wz, &wr, &wh}) require_shape(*w, h, in, "GRU input weight");
  for (const Tensor* u : {&uz, &ur, &uh}) require_shape(*u, h, h, "GRU recurrent weight");
  for (const Tensor* b : {&bz, &br, &bh}) require_shape(*b, 1, h, "GRU bias");
}

GruVars GruParams::bind(Tape& tape, GruParams* grads) const {
  auto p = [&](const Tensor& v, Tensor GruParams::*field) {
    return tape.param(v, grads ? &(grads->*field) : nullptr);
  };
  return {p(wz, &GruParams::wz), p(wr, &GruParams::wr), p(wh, &GruParams::wh),
          p(uz, &GruParams::uz), p(ur, &GruParams::ur), p(uh, &GruParams::uh),
          p(bz, &GruParams::bz), p(br, &GruParams::br), p(bh, &GruParams::bh)};
}

Tensor gru_step(const GruParams& p, const Tensor& x, const Tensor& h) {
  p.validate();
  require_shape(x, x.rows(), p.input(), "GRU input");
  require_shape(h, x.rows(), p.hidden(), "GRU hidden state");
  Tape tape;
  return gru_step(p.bind(tape), tape.constant(x), tape.constant(h)).value();
}

Tensor ffn_forward(const std::vector<DenseLayer>& layers, const Tensor& x) {
  Tape tape;
  std::vector<DenseVars> vars;
  for (const auto& l : layers) vars.push_back({tape.param(l.w, nullptr), tape.param(l.b, nullptr), l.act});
  return ffn_forward(vars, tape.constant(x)).value();
}

Tensor log_softmax(const Tensor& logits) {
  Tape tape;
  return log_softmax(tape.constant(logits)).value();
}

}  // namespace phenogen::nn
