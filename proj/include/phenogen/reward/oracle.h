#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "phenogen/error.h"

namespace phenogen::reward {

/// Outcome of scoring one molecule. `score` is absent on failure, in which
/// case `failure` says why.
struct OracleResult {
  std::optional<double> score;
  std::optional<Errc> failure;
  std::string message;

  static OracleResult ok(double s) { return {s, std::nullopt, {}}; }
  static OracleResult fail(Errc code, std::string why) { return {std::nullopt, code, std::move(why)}; }
};

/// Raw docking-like score source: more negative means stronger binding.
/// Implementations must return a failure for unusable input instead of
/// throwing. Results are joined to inputs by position.
class DockingOracle {
 public:
  virtual ~DockingOracle() = default;

  std::vector<OracleResult> score_batch(const std::vector<std::string>& smiles);
  OracleResult score(const std::string& smiles);

  /// Number of molecules submitted so far, across all batches.
  long molecules_scored() const noexcept { return submitted_; }

 protected:
  virtual std::vector<OracleResult> do_score(const std::vector<std::string>& smiles) = 0;

 private:
  long submitted_ = 0;
};

/// One weighted structural feature of the mock pharmacophore.
struct Feature {
  enum class Kind { kElement, kRings, kAromaticRings, kMwWindow, kMotif };
  Kind kind = Kind::kRings;
  std::string arg;     // element symbol or canonical-key substring
  double weight = 0.0;
  double cap = 0.0;    // counts saturate here; 0 means uncapped
  double lo = 0.0;     // MW window bounds
  double hi = 0.0;
};

/// Text format, one directive per line, '#' starts a comment:
///   base <value>
///   perturbation <amplitude>
///   element <symbol> <weight> [cap]
///   rings <weight> [cap]
///   aromatic_rings <weight> [cap]
///   mw_window <lo> <hi> <weight>
///   motif <substring> <weight>
struct PharmacophoreSpec {
  double base = 0.0;
  double perturbation = 0.1;  // half-width of the uniform hash perturbation
  std::vector<Feature> features;

  static PharmacophoreSpec parse(const std::string& text);
  static PharmacophoreSpec load(const std::filesystem::path& path);
};

/// score = −(base + Σ value·weight) + perturbation·(2u − 1) where u ∈ [0, 1)
/// is a hash of (seed, canonical key). Unparseable or valence-invalid input
/// yields a kParseFailure result.
class MockOracle final : public DockingOracle {
 public:
  MockOracle(std::uint64_t seed, PharmacophoreSpec spec);

  /// Noise-free part of the score, exposed for tests.
  double feature_sum(const std::string& smiles) const;

 protected:
  std::vector<OracleResult> do_score(const std::vector<std::string>& smiles) override;

 private:
  std::uint64_t seed_;
  PharmacophoreSpec spec_;
};

/// Environment variable overriding the per-molecule timeout, in seconds.
inline constexpr const char* kOracleTimeoutEnv = "PHENOGEN_ORACLE_TIMEOUT";

/// Runs a shell command once per batch. The template's `{in}` and `{out}`
/// placeholders become paths of the ligand file (one SMILES per line, LF)
/// and the score file the command must write. Score lines match
/// `score\s+<index>\s+<float>` with 0-based indices; other lines are
/// ignored. The batch deadline is the per-molecule timeout times the batch
/// size; on expiry the process group is killed.
class ExternalOracle final : public DockingOracle {
 public:
  ExternalOracle(std::string command_template, std::filesystem::path workdir,
                 std::chrono::duration<double> per_molecule_timeout = std::chrono::seconds(30));

  std::chrono::duration<double> per_molecule_timeout() const noexcept { return timeout_; }

 protected:
  std::vector<OracleResult> do_score(const std::vector<std::string>& smiles) override;

 private:
  std::string template_;
  std::filesystem::path workdir_;
  std::chrono::duration<double> timeout_;
  std::mutex mutex_;
  long batch_ = 0;
};

}  // namespace phenogen::reward
