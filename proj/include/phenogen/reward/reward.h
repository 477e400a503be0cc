#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phenogen/chem/qed.h"
#include "phenogen/reward/oracle.h"

namespace phenogen::reward {

enum class AsMode { kReward, kDockOnly };

struct RewardConfig {
  double k = -10.0;            // rescaling factor, strictly negative
  double qed_threshold = 0.3;  // in [0, 1)
  AsMode as_mode = AsMode::kReward;
  chem::QedParams qed_params = chem::QedParams::defaults();

  /// Throws Error{kNonNegativeK} or Error{kInvalidArgument}.
  void validate() const;
};

struct RewardRecord {
  std::string smiles;
  std::string key;            // canonical key; empty when the text does not parse
  bool chem_valid = false;    // parses and passes the valence check
  bool valid = false;         // chem_valid, qed gate passed and oracle succeeded
  bool oracle_failed = false;
  std::optional<double> raw_dock;
  double dock = 0.0;
  double qed = 0.0;
  double reward = 0.0;
  double as_score = 0.0;
  std::string note;  // why the record is invalid, when it is
};

/// Parses, checks valence and gates on QED; never throws.
bool is_valid(const std::string& smiles, const RewardConfig& cfg);

/// max(raw, k)/k clamped to [0, 1]; 0 when invalid. Throws
/// Error{kNonNegativeK} for k ≥ 0 and Error{kNonFinite} for a non-finite raw
/// score on a valid molecule.
double normalize_dock(double raw, bool valid, double k);

/// Full record for one molecule. The oracle is consulted only when the
/// molecule passes the validity gate; an oracle failure zeroes the reward.
RewardRecord reward(const std::string& smiles, DockingOracle& oracle, const RewardConfig& cfg);

/// Batched form: one oracle call covering only the gated-in molecules.
std::vector<RewardRecord> reward_batch(const std::vector<std::string>& smiles, DockingOracle& oracle,
                                       const RewardConfig& cfg);

/// Reward cache keyed by canonical key, so respellings of a molecule are
/// scored once. Unparseable strings are keyed by their text. Oracle
/// failures are not cached and are retried on the next request.
class RewardMemo {
 public:
  RewardMemo(DockingOracle& oracle, RewardConfig cfg);

  std::vector<RewardRecord> evaluate(const std::vector<std::string>& smiles);

  std::size_t size() const noexcept { return cache_.size(); }
  long hits() const noexcept { return hits_; }
  const RewardConfig& config() const noexcept { return cfg_; }

 private:
  DockingOracle* oracle_;
  RewardConfig cfg_;
  std::map<std::string, RewardRecord> cache_;
  long hits_ = 0;
};

}  // namespace phenogen::reward
