#pragma once

#include <vector>

#include "phenogen/nn/tape.h"

namespace phenogen::rl {

/// Loss weights shared by the scalar and tape forms.
struct LossWeights {
  double alpha = 1e-4;  // ranking
  double beta = 1.0;    // prior
  double lambda = 0.05; // entropy
  double gamma = 0.2;   // rank margin unit
  bool baseline = false;
  double prior_scale = 100.0;  // C in the effective score reward + β·log p_prior / C
};

struct LossBreakdown {
  double l_pg = 0.0;            // literal policy-gradient term on the reward
  double l_rank = 0.0;
  double l_prior = 0.0;         // literal: −mean prior log-likelihood
  double l_ent = 0.0;
  double total = 0.0;           // l_pg + α·l_rank + β·l_prior − λ·l_ent
  double l_pg_effective = 0.0;  // policy-gradient term on the prior-augmented score
  double objective = 0.0;       // l_pg_effective + α·l_rank + β·l_prior − λ·l_ent; the differentiated loss
};

/// −(1/N) Σ logp·score, with score centred on its batch mean when `baseline`.
double pg_loss(const std::vector<double>& logps, const std::vector<double>& scores, bool baseline = false);

/// Σ_{i<j} max(0, f_j − f_i + (j − i)·γ) over positions in the as-descending
/// order (1-based differences; stable for equal keys). Pairs whose as keys
/// tie contribute nothing.
double rank_loss(const std::vector<double>& f, const std::vector<double>& as_scores, double gamma);

double prior_loss(const std::vector<double>& prior_logps);

/// Mean of per-sequence entropies.
double entropy_loss(const std::vector<double>& entropies);

/// Fills `total` from the four literal components.
LossBreakdown combine(double l_pg, double l_rank, double l_prior, double l_ent, const LossWeights& w);

/// Rewards plus β·log p_prior / C, the per-sequence score the policy
/// gradient sees.
std::vector<double> effective_scores(const std::vector<double>& rewards, const std::vector<double>& prior_logps,
                                     const LossWeights& w);

/// Tape forms over an N×1 column of agent log-likelihoods.
nn::Var pg_loss(nn::Var logps, const std::vector<double>& scores, bool baseline = false);
nn::Var rank_loss(nn::Var f, const std::vector<double>& as_scores, double gamma);

struct TapeLoss {
  nn::Var objective;
  LossBreakdown breakdown;
};

/// Builds the differentiated objective from agent log-likelihoods and
/// entropies (both N×1) and fills every breakdown field.
TapeLoss combined_loss(nn::Var agent_logps, nn::Var entropies, const std::vector<double>& rewards,
                       const std::vector<double>& as_scores, const std::vector<double>& prior_logps,
                       const LossWeights& w);

}  // namespace phenogen::rl
