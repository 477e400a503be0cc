#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace phenogen::nn {

/// Dense row-major matrix of doubles. Vectors are 1×n; batches put one
/// example per row.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int rows, int cols, double fill = 0.0);
  Tensor(int rows, int cols, std::vector<double> data);
  static Tensor row(std::vector<double> values);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::vector<int> shape() const { return {rows_, cols_}; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(int r, int c) noexcept { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const noexcept { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }
  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  const std::vector<double>& values() const noexcept { return data_; }

  void fill(double v);
  bool same_shape(const Tensor& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }
  bool all_finite() const noexcept;
  bool operator==(const Tensor& o) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// Named parameter arrays. Ordered by name so iteration, serialization and
/// hashing are deterministic.
using ParamStore = std::map<std::string, Tensor>;

/// Zero tensors with the shapes of `params`.
ParamStore zeros_like(const ParamStore& params);

/// Throws Error{kShapeMismatch} with `what` when shapes differ.
void require_shape(const Tensor& t, int rows, int cols, const char* what);

}  // namespace phenogen::nn
