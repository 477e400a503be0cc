#include "phenogen/nn/tape.h"

#include "phenogen/error.h"

namespace phenogen::nn {

const Tensor& Var::value() const {
  if (!tape_) throw Error(Errc::kInvalidArgument, "unbound variable");
  return tape_->value(id_);
}

double Var::item() const {
  const Tensor& v = value();
  if (v.size() != 1) throw Error(Errc::kShapeMismatch, "item() needs a 1x1 variable");
  return v[0];
}

Var Tape::constant(Tensor value) {
  if (!value.all_finite()) throw Error(Errc::kNonFinite, "non-finite constant");
  Node n;
  n.op = "constant";
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::param(const Tensor& value, Tensor* grad) {
  if (grad && !grad->same_shape(value)) throw Error(Errc::kShapeMismatch, "parameter gradient shape");
  Node n;
  n.op = "param";
  n.external = &value;
  n.param_grad = grad;
  n.requires_grad = grad != nullptr;
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::record(const char* op, Tensor value, std::vector<int> inputs, BackwardFn backward) {
  if (!value.all_finite()) throw Error(Errc::kNonFinite, std::string("non-finite value produced by ") + op);
  const int self = static_cast<int>(nodes_.size());
  Node n;
  n.op = op;
  n.value = std::move(value);
  for (int in : inputs) {
    if (in < 0 || in >= self) throw Error(Errc::kGraphCycle, std::string(op) + " reads a node that is not older");
    n.requires_grad = n.requires_grad || nodes_[in].requires_grad;
  }
  n.inputs = std::move(inputs);
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return {this, self};
}

const Tensor& Tape::value(int id) const {
  const Node& n = nodes_.at(id);
  return n.external ? *n.external : n.value;
}

Tensor& Tape::grad(int id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) {
    const Tensor& v = value(id);
    n.grad = Tensor(v.rows(), v.cols());
  }
  return n.grad;
}

void Tape::backward(Var loss) {
  if (loss.tape() != this) throw Error(Errc::kInvalidArgument, "loss belongs to another tape");
  const Tensor& lv = value(loss.id());
  if (lv.size() != 1) throw Error(Errc::kShapeMismatch, "backward needs a scalar loss");
  if (!nodes_[loss.id()].requires_grad) return;
  grad(loss.id())[0] += 1.0;
  for (int id = loss.id(); id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.requires_grad || n.grad.empty()) continue;
    if (!n.grad.all_finite()) throw Error(Errc::kNonFinite, std::string("non-finite gradient at ") + n.op);
    if (n.param_grad) {
      Tensor& g = *n.param_grad;
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
    } else if (n.backward) {
      n.backward(*this, id);
    }
  }
}

void Tape::clear() { nodes_.clear(); }

}  // namespace phenogen::nn
