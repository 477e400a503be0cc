#pragma once

#include <deque>
#include <functional>
#include <vector>

#include "phenogen/nn/tensor.h"

namespace phenogen::nn {

class Tape;

/// Handle to a value recorded on a Tape. Only valid while the tape is
/// alive and has not been cleared.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}
  Tape* tape() const noexcept { return tape_; }
  int id() const noexcept { return id_; }
  bool valid() const noexcept { return tape_ != nullptr; }
  const Tensor& value() const;
  int rows() const { return value().rows(); }
  int cols() const { return value().cols(); }
  /// Scalar value of a 1×1 variable.
  double item() const;

 private:
  Tape* tape_ = nullptr;
  int id_ = -1;
};

/// Reverse-mode autodiff tape. Every op appends one node whose inputs have
/// smaller ids, so reverse id order is a valid topological order.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, int self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  /// Leaf that reads `value` in place. When `grad` is non-null, backward
  /// adds this leaf's gradient into it; the storage must outlive the tape.
  Var param(const Tensor& value, Tensor* grad);

  /// Appends an op node. Throws Error{kNonFinite} naming `op` when the
  /// value contains NaN or infinity.
  Var record(const char* op, Tensor value, std::vector<int> inputs, BackwardFn backward);

  /// Propagates d(loss)/d(node) for a 1×1 loss and accumulates parameter
  /// gradients.
  void backward(Var loss);

  void clear();
  std::size_t size() const noexcept { return nodes_.size(); }

  const Tensor& value(int id) const;
  bool requires_grad(int id) const { return nodes_[id].requires_grad; }
  /// Gradient buffer of a node, allocated as zeros on first use.
  Tensor& grad(int id);
  bool has_grad(int id) const { return !nodes_[id].grad.empty(); }

 private:
  struct Node {
    const char* op = "";
    Tensor value;
    const Tensor* external = nullptr;
    Tensor* param_grad = nullptr;
    Tensor grad;
    std::vector<int> inputs;
    BackwardFn backward;
    bool requires_grad = false;
  };
  std::deque<Node> nodes_;
};

}  // namespace phenogen::nn
