#pragma once

#include <array>
#include <filesystem>
#include <string_view>

#include "phenogen/chem/descriptors.h"

namespace phenogen::chem {

/// Coefficients of the asymmetric double sigmoid used as a desirability.
struct Desirability {
  double a = 0, b = 0, c = 0, d = 0, e = 1, f = 1, dmax = 1;

  /// Raw curve value divided by dmax, clamped into (0, 1].
  double operator()(double x) const noexcept;
};

enum class QedTerm : int { kMw = 0, kLogp, kHba, kHbd, kPsa, kRotb, kArom, kAlerts };
inline constexpr int kQedTermCount = 8;
inline constexpr std::array<std::string_view, kQedTermCount> kQedTermNames = {
    "mw", "logp", "hba", "hbd", "psa", "rotb", "arom", "alerts"};

struct QedParams {
  std::array<Desirability, kQedTermCount> curves{};
  std::array<double, kQedTermCount> weights{};

  /// Shipped defaults from data/qed_params.txt.
  static const QedParams& defaults();
  static QedParams from_text(std::string_view text);
  static QedParams load(const std::filesystem::path& path);
};

std::array<double, kQedTermCount> qed_inputs(const DescriptorVector& d) noexcept;

/// Weighted geometric mean of the per-descriptor desirabilities.
/// Throws Error{kDegenerateParams} when no weight is positive.
double qed(const DescriptorVector& d, const QedParams& params = QedParams::defaults());

}  // namespace phenogen::chem
