#include "phenogen/rl/trainer.h"

#include <cstdio>
#include <set>

#include "phenogen/error.h"
#include "phenogen/generator/networks.h"
#include "phenogen/generator/sampling.h"
#include "phenogen/hash.h"
#include "phenogen/nn/adam.h"

namespace phenogen::rl {
namespace {

bool decoder_only(const std::string& name) { return gen::in_block(name, gen::kMolDecoder); }

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

void TrainerConfig::validate() const {
  const LossWeights& w = weights;
  if (w.alpha < 0 || w.beta < 0 || w.lambda < 0 || w.gamma < 0) {
    throw Error(Errc::kInvalidArgument, "alpha, beta, lambda and gamma must be non-negative");
  }
  if (!(w.prior_scale > 0)) throw Error(Errc::kInvalidArgument, "prior scale must be positive");
  if (batch_size < 2) throw Error(Errc::kInvalidArgument, "batch size must be at least 2");
  if (!(lr > 0)) throw Error(Errc::kInvalidArgument, "learning rate must be positive");
  if (steps < 0) throw Error(Errc::kInvalidArgument, "steps must be non-negative");
  if (max_len < 1) throw Error(Errc::kInvalidArgument, "max_len must be positive");
  if (oracle_retries < 0) throw Error(Errc::kInvalidArgument, "oracle_retries must be non-negative");
}

std::vector<double> EpisodeBatch::reward_values() const {
  std::vector<double> out;
  for (const auto& r : rewards) out.push_back(r.reward);
  return out;
}

std::vector<double> EpisodeBatch::as_values() const {
  std::vector<double> out;
  for (const auto& r : rewards) out.push_back(r.as_score);
  return out;
}

EpisodeBatch sample_batch(const gen::ModelParams& agent, const std::vector<gen::ExpressionProfile>& profiles, int n,
                          std::mt19937_64& rng, const chem::Vocabulary& vocab, int max_len) {
  if (n < 2) throw Error(Errc::kInvalidArgument, "batch size must be at least 2");
  if (profiles.empty()) throw Error(Errc::kInvalidArgument, "at least one expression profile is required");
  const int genes = agent.config.genes;
  nn::Tensor x(n, genes);
  for (int i = 0; i < n; ++i) {
    const auto& p = profiles[static_cast<std::size_t>(i) % profiles.size()];
    if (static_cast<int>(p.size()) != genes) {
      throw Error(Errc::kGeneCountMismatch, "profile has " + std::to_string(p.size()) + " genes, model expects " +
                                                std::to_string(genes));
    }
    for (int g = 0; g < genes; ++g) x(i, g) = p[g];
  }
  std::vector<std::uint64_t> latent_seeds(n), decode_seeds(n);
  for (int i = 0; i < n; ++i) {
    latent_seeds[i] = rng();
    decode_seeds[i] = rng();
  }
  const auto [mu, logvar] = gen::encode_expression(agent, x);
  EpisodeBatch b;
  b.latents = gen::sample_latents(mu, logvar, latent_seeds);
  b.sequences = gen::decode_batch(agent, b.latents, gen::DecodeMode::kSample, decode_seeds, vocab, max_len);
  for (const auto& s : b.sequences) b.smiles.push_back(chem::detokenize(s, vocab));

  nn::Tape tape;
  const gen::BoundModel m(tape, agent);
  const gen::TeacherForced tf = gen::teacher_force(m, tape.constant(b.latents), b.sequences, vocab);
  for (int i = 0; i < n; ++i) {
    b.agent_logps.push_back(tf.logp.value()(i, 0));
    b.entropies.push_back(tf.entropy.value()(i, 0));
  }
  return b;
}

void attach_prior(EpisodeBatch& batch, const gen::ModelParams& prior, const chem::Vocabulary& vocab) {
  batch.prior_logps = gen::sequence_log_likelihoods(prior, batch.sequences, batch.latents, vocab);
}

void attach_rewards(EpisodeBatch& batch, reward::RewardMemo& memo, int retries) {
  batch.rewards = memo.evaluate(batch.smiles);
  for (int attempt = 0; attempt < retries; ++attempt) {
    std::vector<std::size_t> failed;
    std::vector<std::string> again;
    for (std::size_t i = 0; i < batch.rewards.size(); ++i) {
      if (batch.rewards[i].oracle_failed) {
        failed.push_back(i);
        again.push_back(batch.smiles[i]);
      }
    }
    if (failed.empty()) return;
    const auto redo = memo.evaluate(again);
    for (std::size_t k = 0; k < failed.size(); ++k) batch.rewards[failed[k]] = redo[k];
  }
  int gated_in = 0, answered = 0;
  std::string last;
  for (const auto& r : batch.rewards) {
    if (r.valid || r.oracle_failed) ++gated_in;
    if (r.valid) ++answered;
    if (r.oracle_failed) last = r.note;
  }
  if (gated_in > 0 && answered == 0) {
    throw Error(Errc::kOracleUnavailable, "no oracle answer for any molecule in the batch after " +
                                              std::to_string(retries) + " retries (" + last + ")");
  }
}

LossBreakdown loss_and_gradient(const gen::ModelParams& agent, const EpisodeBatch& batch, const LossWeights& w,
                                const chem::Vocabulary& vocab, nn::ParamStore& grads) {
  nn::Tape tape;
  const gen::BoundModel m(tape, agent, &grads, &decoder_only);
  const gen::TeacherForced tf = gen::teacher_force(m, tape.constant(batch.latents), batch.sequences, vocab);
  const TapeLoss loss =
      combined_loss(tf.logp, tf.entropy, batch.reward_values(), batch.as_values(), batch.prior_logps, w);
  tape.backward(loss.objective);
  return loss.breakdown;
}

std::string format_run_log(const std::vector<StepRecord>& log) {
  std::string out =
      "step\tl_pg\tl_rank\tl_prior\tl_ent\ttotal\tmean_reward\tvalidity_rate\tmean_entropy\tunique_in_batch"
      "\tl_pg_effective\tobjective\tmean_logp_gap\n";
  char buf[64];
  for (const auto& r : log) {
    out += std::to_string(r.step);
    for (double v : {r.loss.l_pg, r.loss.l_rank, r.loss.l_prior, r.loss.l_ent, r.loss.total, r.mean_reward,
                     r.validity_rate, r.mean_entropy, r.unique_in_batch, r.loss.l_pg_effective, r.loss.objective,
                     r.mean_logp_gap}) {
      std::snprintf(buf, sizeof buf, "\t%.17g", v);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

FinetuneResult finetune(const gen::ModelParams& prior, reward::DockingOracle& oracle,
                        const std::vector<gen::ExpressionProfile>& profiles, const TrainerConfig& cfg,
                        const reward::RewardConfig& reward_cfg, const chem::Vocabulary& vocab,
                        const StepCallback& on_step) {
  cfg.validate();
  LossWeights w = cfg.weights;
  w.prior_scale = cfg.max_len;
  FinetuneResult result{prior, {}};
  gen::ModelParams& agent = result.agent;
  nn::AdamConfig adam;
  adam.lr = cfg.lr;
  nn::AdamState state(adam);
  reward::RewardMemo memo(oracle, reward_cfg);

  for (int step = 1; step <= cfg.steps; ++step) {
    std::mt19937_64 rng(derive_seed(cfg.seed, fnv1a(std::string_view("rl-step")), static_cast<std::uint64_t>(step)));
    StepRecord rec;
    rec.step = step;
    try {
      EpisodeBatch batch = sample_batch(agent, profiles, cfg.batch_size, rng, vocab, cfg.max_len);
      attach_prior(batch, prior, vocab);
      attach_rewards(batch, memo, cfg.oracle_retries);
      nn::ParamStore grads;
      rec.loss = loss_and_gradient(agent, batch, w, vocab, grads);
      nn::adam_step(agent.tensors, grads, state);

      const double n = static_cast<double>(batch.size());
      std::set<std::string> keys;
      double valid = 0.0, gap = 0.0;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& r = batch.rewards[i];
        if (r.chem_valid) {
          valid += 1.0;
          keys.insert(r.key);
        }
        gap += batch.agent_logps[i] - batch.prior_logps[i];
      }
      rec.mean_reward = mean_of(batch.reward_values());
      rec.validity_rate = valid / n;
      rec.mean_entropy = mean_of(batch.entropies);
      rec.unique_in_batch = static_cast<double>(keys.size()) / n;
      rec.mean_logp_gap = gap / n;
    } catch (const Error& e) {
      if (e.code() == Errc::kNonFinite) {
        throw Error(Errc::kDivergedLoss, "fine-tuning diverged at step " + std::to_string(step) + ": " + e.what());
      }
      throw;
    }
    result.log.push_back(rec);
    if (on_step) on_step(rec);
  }
  return result;
}

}  // namespace phenogen::rl
