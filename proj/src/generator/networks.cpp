#include "phenogen/generator/networks.h"

#include <algorithm>

#include "phenogen/error.h"
#include "phenogen/nn/layers.h"

namespace phenogen::gen {
namespace {

using nn::Var;

nn::GruVars gru_vars(const BoundModel& m, const std::string& prefix) {
  return {m[prefix + "wz"], m[prefix + "wr"], m[prefix + "wh"], m[prefix + "uz"], m[prefix + "ur"],
          m[prefix + "uh"], m[prefix + "bz"], m[prefix + "br"], m[prefix + "bh"]};
}

Var dense(const BoundModel& m, const std::string& prefix, Var x) { return nn::linear(x, m[prefix + "w"], m[prefix + "b"]); }

Var maybe_dropout(Var x, DropoutCtx drop) { return drop.active() ? nn::dropout(x, drop.rate, *drop.rng) : x; }

// Runs one direction of the encoder stack. `tokens[t][b]` is the token of
// row b at time t and `live[t]` the B×1 mask of rows still inside their
// sequence; finished rows keep their last state.
Var run_direction(const BoundModel& m, const std::string& prefix, const std::vector<std::vector<int>>& tokens,
                  const std::vector<Var>& live, int batch, DropoutCtx drop) {
  const ModelConfig& c = m.config();
  nn::Tape& tape = m.tape();
  std::vector<Var> h(c.layers);
  for (auto& v : h) v = tape.constant(nn::Tensor(batch, c.hidden));
  std::vector<nn::GruVars> cells;
  for (int l = 0; l < c.layers; ++l) cells.push_back(gru_vars(m, prefix + std::to_string(l) + "."));
  const Var table = m[std::string(kMolEncoder) + "embed"];
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    Var x = nn::embedding(table, tokens[t]);
    for (int l = 0; l < c.layers; ++l) {
      const Var next = nn::gru_step(cells[l], x, h[l]);
      h[l] = nn::add(nn::mul_col(next, live[t]), nn::mul_col(h[l], nn::one_minus(live[t])));
      x = l + 1 < c.layers ? maybe_dropout(h[l], drop) : h[l];
    }
  }
  return h.back();
}

}  // namespace

Gaussian encode_expression(const BoundModel& m, Var profiles, DropoutCtx drop) {
  const ModelConfig& c = m.config();
  nn::require_shape(profiles.value(), profiles.rows(), c.genes, "expression profile");
  const std::string p(kExpEncoder);
  Var x = profiles;
  for (std::size_t i = 0; i < c.exp_hidden.size(); ++i) {
    x = maybe_dropout(nn::tanh(dense(m, p + std::to_string(i) + ".", x)), drop);
  }
  return {dense(m, p + "mu.", x), dense(m, p + "logvar.", x)};
}

Var decode_profile(const BoundModel& m, Var z, DropoutCtx drop) {
  const ModelConfig& c = m.config();
  const std::string p(kExpDecoder);
  Var x = z;
  for (std::size_t i = 0; i < c.exp_hidden.size(); ++i) {
    x = maybe_dropout(nn::tanh(dense(m, p + std::to_string(i) + ".", x)), drop);
  }
  return dense(m, p + "out.", x);
}

Gaussian encode_molecules(const BoundModel& m, const std::vector<chem::TokenSequence>& seqs, DropoutCtx drop) {
  if (seqs.empty()) throw Error(Errc::kInvalidArgument, "no sequences to encode");
  const int B = static_cast<int>(seqs.size());
  std::vector<std::vector<int>> body(B);
  std::size_t T = 1;
  for (int b = 0; b < B; ++b) {
    const auto& ids = seqs[b].ids;
    const std::size_t end = seqs[b].truncated ? ids.size() : ids.size() - 1;
    body[b].assign(ids.begin() + 1, ids.begin() + static_cast<std::ptrdiff_t>(std::max<std::size_t>(end, 1)));
    T = std::max(T, body[b].size());
  }
  nn::Tape& tape = m.tape();
  std::vector<std::vector<int>> fwd(T, std::vector<int>(B, 0)), bwd(T, std::vector<int>(B, 0));
  std::vector<Var> live;
  for (std::size_t t = 0; t < T; ++t) {
    nn::Tensor mask(B, 1);
    for (int b = 0; b < B; ++b) {
      const std::size_t n = body[b].size();
      if (t < n) {
        fwd[t][b] = body[b][t];
        bwd[t][b] = body[b][n - 1 - t];
        mask(b, 0) = 1.0;
      }
    }
    live.push_back(tape.constant(std::move(mask)));
  }
  const std::string p(kMolEncoder);
  const Var hf = run_direction(m, p + "fwd.", fwd, live, B, drop);
  const Var hb = run_direction(m, p + "bwd.", bwd, live, B, drop);
  const Var both = nn::concat_cols(hf, hb);
  return {dense(m, p + "mu.", both), dense(m, p + "logvar.", both)};
}

Var reparameterize(Gaussian q, std::mt19937_64& rng) {
  const nn::Tensor& lv = q.logvar.value();
  if (!lv.same_shape(q.mu.value())) throw Error(Errc::kShapeMismatch, "reparameterize: mu/logvar shapes differ");
  std::normal_distribution<double> n01(0.0, 1.0);
  nn::Tensor eps(lv.rows(), lv.cols());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double e = n01(rng);
    eps[i] = lv[i] < -40.0 ? 0.0 : e;
  }
  nn::Tape& tape = *q.mu.tape();
  return nn::add(q.mu, nn::mul(nn::exp(nn::scale(q.logvar, 0.5)), tape.constant(std::move(eps))));
}

Var gaussian_kl(Gaussian q) {
  const Var terms = nn::sub(nn::add(nn::exp(q.logvar), nn::square(q.mu)), nn::add_scalar(q.logvar, 1.0));
  return nn::scale(nn::row_sum(terms), 0.5);
}

Var gaussian_kl_between(Gaussian q, Gaussian p) {
  // 0.5 Σ (lv_p − lv_q + (exp(lv_q) + (μ_q − μ_p)²) / exp(lv_p) − 1)
  const Var inv_var_p = nn::exp(nn::scale(p.logvar, -1.0));
  const Var spread = nn::mul(nn::add(nn::exp(q.logvar), nn::square(nn::sub(q.mu, p.mu))), inv_var_p);
  const Var terms = nn::add_scalar(nn::add(nn::sub(p.logvar, q.logvar), spread), -1.0);
  return nn::scale(nn::row_sum(terms), 0.5);
}

std::vector<bool> emittable_mask(const chem::Vocabulary& vocab) {
  std::vector<bool> allowed(vocab.size(), true);
  allowed[vocab.pad_id()] = false;
  allowed[vocab.bos_id()] = false;
  return allowed;
}

DecoderState decoder_init(const BoundModel& m, Var z) {
  const ModelConfig& c = m.config();
  nn::require_shape(z.value(), z.rows(), c.latent, "latent");
  DecoderState h;
  for (int l = 0; l < c.layers; ++l) h.push_back(dense(m, std::string(kMolDecoder) + "init." + std::to_string(l) + ".", z));
  return h;
}

Var decoder_step(const BoundModel& m, DecoderState& state, const std::vector<int>& tokens, Var z, DropoutCtx drop) {
  const ModelConfig& c = m.config();
  const std::string p(kMolDecoder);
  Var x = nn::concat_cols(nn::embedding(m[p + "embed"], tokens), z);
  for (int l = 0; l < c.layers; ++l) {
    state[l] = nn::gru_step(gru_vars(m, p + "gru." + std::to_string(l) + "."), x, state[l]);
    x = maybe_dropout(state[l], drop);
  }
  return dense(m, p + "out.", x);
}

TeacherForced teacher_force(const BoundModel& m, Var z, const std::vector<chem::TokenSequence>& seqs,
                            const chem::Vocabulary& vocab, DropoutCtx drop) {
  const int B = static_cast<int>(seqs.size());
  if (B == 0 || z.rows() != B) throw Error(Errc::kShapeMismatch, "teacher_force: one latent row per sequence");
  if (m.config().vocab_size != vocab.size()) throw Error(Errc::kVocabularyMismatch, "model and vocabulary sizes differ");
  std::size_t T = 0;
  for (const auto& s : seqs) {
    if (s.ids.size() < 2 || s.ids.front() != vocab.bos_id()) {
      throw Error(Errc::kInvalidArgument, "teacher_force: sequence must start with BOS and have a target");
    }
    T = std::max(T, s.ids.size() - 1);
  }
  nn::Tape& tape = m.tape();
  const std::vector<bool> allowed = emittable_mask(vocab);
  DecoderState state = decoder_init(m, z);
  Var logp_total, ent_total;
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<int> inputs(B), targets(B);
    nn::Tensor live(B, 1);
    for (int b = 0; b < B; ++b) {
      const auto& ids = seqs[b].ids;
      const bool active = t + 1 < ids.size();
      inputs[b] = active ? ids[t] : vocab.pad_id();
      // Finished rows pick PAD, whose masked log-probability is exactly 0.
      targets[b] = active ? ids[t + 1] : vocab.pad_id();
      live(b, 0) = active ? 1.0 : 0.0;
    }
    const Var lp = nn::log_softmax(decoder_step(m, state, inputs, z, drop), allowed);
    const Var step_logp = nn::pick(lp, targets);
    const Var step_ent =
        nn::mul_col(nn::scale(nn::row_sum(nn::mul(nn::exp(lp), lp)), -1.0), tape.constant(std::move(live)));
    logp_total = t == 0 ? step_logp : nn::add(logp_total, step_logp);
    ent_total = t == 0 ? step_ent : nn::add(ent_total, step_ent);
  }
  return {logp_total, ent_total};
}

}  // namespace phenogen::gen
