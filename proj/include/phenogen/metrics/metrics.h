#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "phenogen/chem/descriptors.h"
#include "phenogen/chem/fingerprint.h"
#include "phenogen/reward/reward.h"

namespace phenogen::metrics {

inline constexpr int kReportSchemaVersion = 1;

/// Fraction of strings that parse and pass the valence check. Throws
/// Error{kEmptyInput} for an empty list.
double validity_rate(const std::vector<std::string>& smiles);

/// Distinct canonical keys over valid molecules. Throws
/// Error{kNoValidMolecules} when nothing is valid.
double uniqueness_rate(const std::vector<std::string>& smiles);

/// Canonical keys of the valid entries of a reference corpus.
std::set<std::string> reference_keys(const std::vector<std::string>& corpus);

/// Fraction of distinct valid generated keys absent from `reference`; 1.0
/// for an empty reference. Throws Error{kNoValidMolecules}.
double novelty_rate(const std::vector<std::string>& generated, const std::set<std::string>& reference);

/// 1 − mean pairwise Tanimoto. With `dedup`, pairs range over distinct valid
/// molecules; without it, over every valid entry. Throws
/// Error{kTooFewMolecules} when fewer than two molecules remain.
double internal_diversity(const std::vector<std::string>& smiles, int n_bits = chem::kDefaultFingerprintBits,
                          bool dedup = true);

/// LogP < 5, MW < 500, HBD < 5 and HBA < 10, all strict.
bool lipinski_pass(const chem::DescriptorVector& d);

struct Summary {
  int count = 0;
  double mean = 0.0;
  double median = 0.0;
  double p90 = 0.0;  // linear interpolation between closest ranks
};

/// Empty input gives nullopt.
std::optional<Summary> summarize(std::vector<double> values);

/// One row per distinct canonical key (or per distinct text when invalid).
struct MoleculeRow {
  std::string key;     // empty when invalid
  std::string smiles;  // first spelling seen after sorting
  int count = 0;       // occurrences in the generated list
  bool valid = false;
  std::optional<double> qed, mw, logp;
  std::optional<int> hbd, hba;
  std::optional<bool> lipinski, novel;
  std::optional<double> raw_dock, dock, reward;
};

struct EvalReport {
  int n_generated = 0;
  int n_valid = 0;
  double validity_rate = 0.0;
  std::optional<double> uniqueness_rate;
  std::optional<double> novelty_rate;
  bool has_reference = false;
  std::optional<Summary> qed, dock, reward;
  std::optional<double> lipinski_pass_rate;
  std::optional<double> internal_diversity;
  std::vector<MoleculeRow> molecules;  // valid keys ascending, then invalid texts ascending
};

/// Computes every metric. Distribution statistics and the Lipinski rate
/// range over distinct valid molecules. `rewards`, when given, must be
/// parallel to `generated`. Throws Error{kEmptyInput} for an empty list.
EvalReport evaluate(const std::vector<std::string>& generated, const std::optional<std::set<std::string>>& reference,
                    const std::vector<reward::RewardRecord>* rewards = nullptr);

std::string report_json(const EvalReport& report);
std::string report_table(const EvalReport& report);

/// Writes both files or neither. Throws Error{kIoFailure}, including for a
/// report with no molecules.
void emit_report(const EvalReport& report, const std::filesystem::path& json_path,
                 const std::filesystem::path& table_path);

}  // namespace phenogen::metrics
