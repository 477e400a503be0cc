#include "phenogen/reward/reward.h"

#include <algorithm>
#include <cmath>

#include "phenogen/chem/canonical.h"
#include "phenogen/chem/descriptors.h"
#include "phenogen/chem/smiles_parser.h"
#include "phenogen/chem/valence.h"

namespace phenogen::reward {
namespace {

// Validity gate; fills qed and note, leaves dock and reward at zero.
RewardRecord gate(const std::string& smiles, const RewardConfig& cfg) {
  RewardRecord r;
  r.smiles = smiles;
  try {
    const chem::MolGraph g = chem::parse_smiles(smiles);
    r.key = chem::canonical_key(g);
    const chem::ValenceVerdict v = chem::check_valence(g);
    if (!v.valid) {
      r.note = "valence: " + v.violations.front().message;
      return r;
    }
    r.chem_valid = true;
    r.qed = chem::qed(chem::compute_descriptors(g), cfg.qed_params);
    if (r.qed < cfg.qed_threshold) {
      r.note = "qed below threshold";
      return r;
    }
    r.valid = true;
  } catch (const Error& e) {
    r.note = std::string("parse: ") + e.what();
  }
  return r;
}

void finish(RewardRecord& r, const OracleResult& o, const RewardConfig& cfg) {
  if (!o.score || !std::isfinite(*o.score)) {
    r.valid = false;
    r.oracle_failed = true;
    r.note = "oracle: " + (o.score ? std::string("non-finite score") : o.message);
    return;
  }
  r.raw_dock = *o.score;
  r.dock = normalize_dock(*o.score, true, cfg.k);
  r.reward = r.dock * r.qed;
  r.as_score = cfg.as_mode == AsMode::kReward ? r.reward : r.dock;
}

}  // namespace

void RewardConfig::validate() const {
  if (!(k < 0.0)) throw Error(Errc::kNonNegativeK, "rescaling factor k must be negative");
  if (!(qed_threshold >= 0.0 && qed_threshold < 1.0)) {
    throw Error(Errc::kInvalidArgument, "qed_threshold must lie in [0, 1)");
  }
}

bool is_valid(const std::string& smiles, const RewardConfig& cfg) { return gate(smiles, cfg).valid; }

double normalize_dock(double raw, bool valid, double k) {
  if (!(k < 0.0)) throw Error(Errc::kNonNegativeK, "rescaling factor k must be negative");
  if (!valid) return 0.0;
  if (!std::isfinite(raw)) throw Error(Errc::kNonFinite, "non-finite docking score");
  return std::clamp(std::max(raw, k) / k, 0.0, 1.0);
}

RewardRecord reward(const std::string& smiles, DockingOracle& oracle, const RewardConfig& cfg) {
  return reward_batch({smiles}, oracle, cfg).front();
}

std::vector<RewardRecord> reward_batch(const std::vector<std::string>& smiles, DockingOracle& oracle,
                                       const RewardConfig& cfg) {
  cfg.validate();
  std::vector<RewardRecord> out;
  std::vector<std::string> submit;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < smiles.size(); ++i) {
    out.push_back(gate(smiles[i], cfg));
    if (out.back().valid) {
      submit.push_back(smiles[i]);
      where.push_back(i);
    }
  }
  if (submit.empty()) return out;
  const std::vector<OracleResult> scores = oracle.score_batch(submit);
  for (std::size_t j = 0; j < where.size(); ++j) finish(out[where[j]], scores[j], cfg);
  return out;
}

RewardMemo::RewardMemo(DockingOracle& oracle, RewardConfig cfg) : oracle_(&oracle), cfg_(std::move(cfg)) {
  cfg_.validate();
}

std::vector<RewardRecord> RewardMemo::evaluate(const std::vector<std::string>& smiles) {
  std::vector<std::string> keys;
  std::vector<std::string> fresh;
  std::map<std::string, std::size_t> pending;
  std::map<std::string, RewardRecord> failed;
  for (const auto& s : smiles) {
    std::string key;
    try {
      key = chem::canonical_key(chem::parse_smiles(s));
    } catch (const Error&) {
      key = "!" + s;
    }
    if (!cache_.count(key) && !pending.count(key)) {
      pending.emplace(key, fresh.size());
      fresh.push_back(s);
    }
    keys.push_back(std::move(key));
  }
  if (!fresh.empty()) {
    const std::vector<RewardRecord> scored = reward_batch(fresh, *oracle_, cfg_);
    for (const auto& [key, idx] : pending) {
      if (scored[idx].oracle_failed) {
        failed.emplace(key, scored[idx]);
      } else {
        cache_.emplace(key, scored[idx]);
      }
    }
  }
  hits_ += static_cast<long>(smiles.size() - fresh.size());
  std::vector<RewardRecord> out;
  for (std::size_t i = 0; i < smiles.size(); ++i) {
    auto hit = cache_.find(keys[i]);
    RewardRecord r = hit != cache_.end() ? hit->second : failed.at(keys[i]);
    r.smiles = smiles[i];
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace phenogen::reward
