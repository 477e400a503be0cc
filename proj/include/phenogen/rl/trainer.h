#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "phenogen/chem/tokenizer.h"
#include "phenogen/chem/vocabulary.h"
#include "phenogen/generator/model.h"
#include "phenogen/reward/reward.h"
#include "phenogen/rl/losses.h"

namespace phenogen::rl {

struct TrainerConfig {
  LossWeights weights;
  int batch_size = 64;
  double lr = 1e-4;
  int steps = 300;
  std::uint64_t seed = 1;
  int max_len = 100;
  int oracle_retries = 3;  // extra attempts before a batch with no oracle answer is fatal

  /// Throws Error{kInvalidArgument} for negative weights, N < 2, lr ≤ 0 or
  /// a negative step count.
  void validate() const;
};

/// One fine-tuning batch; all arrays have length N.
struct EpisodeBatch {
  std::vector<chem::TokenSequence> sequences;
  std::vector<std::string> smiles;
  nn::Tensor latents;  // N×d
  std::vector<double> agent_logps;
  std::vector<double> prior_logps;
  std::vector<reward::RewardRecord> rewards;
  std::vector<double> entropies;

  std::size_t size() const noexcept { return sequences.size(); }
  std::vector<double> reward_values() const;
  std::vector<double> as_values() const;
};

/// Encodes profile i mod P for slot i, draws a latent and sample-decodes
/// under `agent`. Fills sequences, smiles, latents, agent_logps and
/// entropies. Per-slot generators are seeded from `rng`, so the batch is a
/// pure function of (agent, profiles, N, rng state).
EpisodeBatch sample_batch(const gen::ModelParams& agent, const std::vector<gen::ExpressionProfile>& profiles, int n,
                          std::mt19937_64& rng, const chem::Vocabulary& vocab, int max_len);

/// Teacher-forced log-likelihoods of the batch under `prior` with the
/// batch's own latents.
void attach_prior(EpisodeBatch& batch, const gen::ModelParams& prior, const chem::Vocabulary& vocab);

/// Scores the batch through the memo, retrying oracle-failed molecules up to
/// `retries` extra times. Throws Error{kOracleUnavailable} when every
/// gated-in molecule still lacks an oracle answer.
void attach_rewards(EpisodeBatch& batch, reward::RewardMemo& memo, int retries);

/// Recomputes agent log-likelihoods and entropies on a tape, builds the
/// combined objective and accumulates d(objective)/d(agent) for the
/// molecule-decoder block into `grads`.
LossBreakdown loss_and_gradient(const gen::ModelParams& agent, const EpisodeBatch& batch, const LossWeights& w,
                                const chem::Vocabulary& vocab, nn::ParamStore& grads);

struct StepRecord {
  int step = 0;
  LossBreakdown loss;
  double mean_reward = 0.0;
  double validity_rate = 0.0;    // parse + valence
  double mean_entropy = 0.0;
  double unique_in_batch = 0.0;  // distinct valid canonical keys / N
  double mean_logp_gap = 0.0;    // mean(agent logp − prior logp) before the update
};

/// Tab-separated run log with a header line; 17 significant digits.
std::string format_run_log(const std::vector<StepRecord>& log);

struct FinetuneResult {
  gen::ModelParams agent;
  std::vector<StepRecord> log;
};

using StepCallback = std::function<void(const StepRecord&)>;

/// Agent starts as a copy of `prior`; only the molecule decoder is updated.
/// Throws Error{kDivergedLoss} on a non-finite loss or gradient and
/// Error{kOracleUnavailable} from attach_rewards.
FinetuneResult finetune(const gen::ModelParams& prior, reward::DockingOracle& oracle,
                        const std::vector<gen::ExpressionProfile>& profiles, const TrainerConfig& cfg,
                        const reward::RewardConfig& reward_cfg, const chem::Vocabulary& vocab,
                        const StepCallback& on_step = nullptr);

}  // namespace phenogen::rl
