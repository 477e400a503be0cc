#include "phenogen/nn/tensor.h"

#include <cmath>

#include "phenogen/error.h"

namespace phenogen::nn {

Tensor::Tensor(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {
  if (rows < 0 || cols < 0) throw Error(Errc::kShapeMismatch, "negative tensor dimension");
}

Tensor::Tensor(int rows, int cols, std::vector<double> data) : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows < 0 || cols < 0 || data_.size() != static_cast<std::size_t>(rows) * cols) {
    throw Error(Errc::kShapeMismatch, "tensor data length does not match shape " + std::to_string(rows) + "x" +
                                          std::to_string(cols));
  }
}

Tensor Tensor::row(std::vector<double> values) {
  const int n = static_cast<int>(values.size());
  return Tensor(1, n, std::move(values));
}

void Tensor::fill(double v) {
  for (double& x : data_) x = v;
}

bool Tensor::all_finite() const noexcept {
  for (double x : data_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

ParamStore zeros_like(const ParamStore& params) {
  ParamStore out;
  for (const auto& [name, t] : params) out.emplace(name, Tensor(t.rows(), t.cols()));
  return out;
}

void require_shape(const Tensor& t, int rows, int cols, const char* what) {
  if (t.rows() != rows || t.cols() != cols) {
    throw Error(Errc::kShapeMismatch, std::string(what) + ": expected " + std::to_string(rows) + "x" +
                                          std::to_string(cols) + ", got " + std::to_string(t.rows()) + "x" +
                                          std::to_string(t.cols()));
  }
}

}  // namespace phenogen::nn
