#include "phenogen/chem/qed.h"

#include <cmath>
#include <limits>
#include <string>

#include "phenogen/chem/embedded_data.h"
#include "phenogen/chem/tables.h"
#include "phenogen/error.h"

namespace phenogen::chem {

double Desirability::operator()(double x) const noexcept {
  const double rise = 1.0 + std::exp(-(x - c + d / 2.0) / e);
  const double fall = 1.0 + std::exp(-(x - c - d / 2.0) / f);
  const double raw = (a + b / rise * (1.0 - 1.0 / fall)) / dmax;
  if (!(raw > 0.0)) return std::numeric_limits<double>::min();
  return raw > 1.0 ? 1.0 : raw;
}

QedParams QedParams::from_text(std::string_view text) {
  QedParams p;
  std::array<int, kQedTermCount> seen{};
  for (const auto& [key, value] : parse_records(text)) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) throw Error(Errc::kInvalidArgument, "bad QED key '" + key + "'");
    const std::string term = key.substr(0, dot);
    const std::string field = key.substr(dot + 1);
    int idx = -1;
    for (int i = 0; i < kQedTermCount; ++i) {
      if (kQedTermNames[i] == term) idx = i;
    }
    if (idx < 0) throw Error(Errc::kInvalidArgument, "unknown QED term '" + term + "'");
    double v = 0;
    try {
      v = std::stod(value);
    } catch (const std::exception&) {
      throw Error(Errc::kInvalidArgument, "bad QED value for " + key);
    }
    Desirability& cv = p.curves[idx];
    if (field == "a") cv.a = v;
    else if (field == "b") cv.b = v;
    else if (field == "c") cv.c = v;
    else if (field == "d") cv.d = v;
    else if (field == "e") cv.e = v;
    else if (field == "f") cv.f = v;
    else if (field == "dmax") cv.dmax = v;
    else if (field == "weight") {
      if (v < 0) throw Error(Errc::kDegenerateParams, "negative weight for " + term);
      p.weights[idx] = v;
    } else {
      throw Error(Errc::kInvalidArgument, "unknown QED field '" + field + "'");
    }
    ++seen[idx];
  }
  for (int i = 0; i < kQedTermCount; ++i) {
    if (seen[i] != 8) throw Error(Errc::kInvalidArgument, "incomplete QED parameters for " + std::string(kQedTermNames[i]));
  }
  return p;
}

QedParams QedParams::load(const std::filesystem::path& path) { return from_text(read_data_text(path)); }

const QedParams& QedParams::defaults() {
  static const QedParams params = from_text(*embedded_data_file("qed_params.txt"));
  return params;
}

std::array<double, kQedTermCount> qed_inputs(const DescriptorVector& d) noexcept {
  return {d.mw, d.logp_proxy, static_cast<double>(d.hba), static_cast<double>(d.hbd),
          d.psa_proxy, static_cast<double>(d.rot_bonds), static_cast<double>(d.arom_rings),
          static_cast<double>(d.alerts)};
}

double qed(const DescriptorVector& d, const QedParams& params) {
  double weight_sum = 0.0;
  for (double w : params.weights) weight_sum += w;
  if (!(weight_sum > 0.0)) throw Error(Errc::kDegenerateParams, "all QED weights are zero");
  const auto x = qed_inputs(d);
  double acc = 0.0;
  for (int i = 0; i < kQedTermCount; ++i) {
    if (params.weights[i] == 0.0) continue;
    acc += params.weights[i] * std::log(params.curves[i](x[i]));
  }
  return std::exp(acc / weight_sum);
}

}  // namespace phenogen::chem
