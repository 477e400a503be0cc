#include "phenogen/rl/losses.h"

#include <algorithm>
#include <numeric>

#include "phenogen/error.h"
#include "phenogen/nn/ops.h"

namespace phenogen::rl {
namespace {

std::vector<double> centred(std::vector<double> v, bool on) {
  if (!on || v.empty()) return v;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= mean;
  return v;
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

struct RankPair {
  int hi;  // index of the higher-AS molecule (position i)
  int lo;  // index of the lower-AS molecule (position j)
  double margin;
};

std::vector<RankPair> rank_pairs(const std::vector<double>& as_scores, double gamma) {
  std::vector<int> order(as_scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return as_scores[a] > as_scores[b]; });
  std::vector<RankPair> pairs;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (!(as_scores[order[i]] > as_scores[order[j]])) continue;
      pairs.push_back({order[i], order[j], static_cast<double>(j - i) * gamma});
    }
  }
  return pairs;
}

void require_sizes(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw Error(Errc::kShapeMismatch, std::string(what) + ": batch arrays differ in length");
}

}  // namespace

double pg_loss(const std::vector<double>& logps, const std::vector<double>& scores, bool baseline) {
  require_sizes(logps.size(), scores.size(), "pg_loss");
  if (logps.empty()) return 0.0;
  const std::vector<double> s = centred(scores, baseline);
  double acc = 0.0;
  for (std::size_t i = 0; i < logps.size(); ++i) acc += logps[i] * s[i];
  return -acc / static_cast<double>(logps.size());
}

double rank_loss(const std::vector<double>& f, const std::vector<double>& as_scores, double gamma) {
  require_sizes(f.size(), as_scores.size(), "rank_loss");
  double acc = 0.0;
  for (const auto& p : rank_pairs(as_scores, gamma)) acc += std::max(0.0, f[p.lo] - f[p.hi] + p.margin);
  return acc;
}

double prior_loss(const std::vector<double>& prior_logps) { return -mean(prior_logps); }

double entropy_loss(const std::vector<double>& entropies) { return mean(entropies); }

LossBreakdown combine(double l_pg, double l_rank, double l_prior, double l_ent, const LossWeights& w) {
  LossBreakdown b;
  b.l_pg = l_pg;
  b.l_rank = l_rank;
  b.l_prior = l_prior;
  b.l_ent = l_ent;
  b.total = l_pg + w.alpha * l_rank + w.beta * l_prior - w.lambda * l_ent;
  b.l_pg_effective = l_pg;
  b.objective = b.total;
  return b;
}

std::vector<double> effective_scores(const std::vector<double>& rewards, const std::vector<double>& prior_logps,
                                     const LossWeights& w) {
  require_sizes(rewards.size(), prior_logps.size(), "effective_scores");
  std::vector<double> out(rewards.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = rewards[i] + w.beta * prior_logps[i] / w.prior_scale;
  return out;
}

nn::Var pg_loss(nn::Var logps, const std::vector<double>& scores, bool baseline) {
  require_sizes(static_cast<std::size_t>(logps.rows()), scores.size(), "pg_loss");
  const std::vector<double> s = centred(scores, baseline);
  nn::Tensor col(static_cast<int>(s.size()), 1, s);
  return nn::scale(nn::mean(nn::mul(logps, logps.tape()->constant(std::move(col)))), -1.0);
}

nn::Var rank_loss(nn::Var f, const std::vector<double>& as_scores, double gamma) {
  require_sizes(static_cast<std::size_t>(f.rows()), as_scores.size(), "rank_loss");
  const nn::Tensor& fv = f.value();
  std::vector<RankPair> active;
  double acc = 0.0;
  for (const auto& p : rank_pairs(as_scores, gamma)) {
    const double h = fv(p.lo, 0) - fv(p.hi, 0) + p.margin;
    if (h > 0.0) {
      acc += h;
      active.push_back(p);
    }
  }
  const int fi = f.id();
  return f.tape()->record("rank_loss", nn::Tensor(1, 1, acc), {fi}, [fi, active](nn::Tape& t, int self) {
    if (!t.requires_grad(fi)) return;
    const double g = t.grad(self)(0, 0);
    nn::Tensor& gf = t.grad(fi);
    for (const auto& p : active) {
      gf(p.lo, 0) += g;
      gf(p.hi, 0) -= g;
    }
  });
}

TapeLoss combined_loss(nn::Var agent_logps, nn::Var entropies, const std::vector<double>& rewards,
                       const std::vector<double>& as_scores, const std::vector<double>& prior_logps,
                       const LossWeights& w) {
  const std::size_t n = rewards.size();
  require_sizes(static_cast<std::size_t>(agent_logps.rows()), n, "combined_loss");
  require_sizes(static_cast<std::size_t>(entropies.rows()), n, "combined_loss");
  require_sizes(as_scores.size(), n, "combined_loss");
  require_sizes(prior_logps.size(), n, "combined_loss");
  nn::Tape& tape = *agent_logps.tape();

  const nn::Var pg_eff = pg_loss(agent_logps, effective_scores(rewards, prior_logps, w), w.baseline);
  const nn::Var rank = rank_loss(agent_logps, as_scores, w.gamma);
  const nn::Var ent = nn::mean(entropies);
  const double l_prior = prior_loss(prior_logps);

  nn::Var objective = nn::add(pg_eff, nn::scale(rank, w.alpha));
  objective = nn::add(objective, nn::scale(ent, -w.lambda));
  objective = nn::add(objective, tape.constant(nn::Tensor(1, 1, w.beta * l_prior)));

  std::vector<double> logp(n);
  for (std::size_t i = 0; i < n; ++i) logp[i] = agent_logps.value()(static_cast<int>(i), 0);
  TapeLoss out{objective, combine(pg_loss(logp, rewards, w.baseline), rank.item(), l_prior, ent.item(), w)};
  out.breakdown.l_pg_effective = pg_eff.item();
  out.breakdown.objective = objective.item();
  return out;
}

}  // namespace phenogen::rl
