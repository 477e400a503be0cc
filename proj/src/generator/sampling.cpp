#include "phenogen/generator/sampling.h"

#include <cmath>

#include "phenogen/error.h"
#include "phenogen/generator/networks.h"
#include "phenogen/nn/ops.h"

namespace phenogen::gen {

std::vector<chem::TokenSequence> decode_batch(const ModelParams& params, const nn::Tensor& z, DecodeMode mode,
                                              const std::vector<std::uint64_t>& seeds,
                                              const chem::Vocabulary& vocab, int max_len) {
  const ModelConfig& c = params.config;
  const int B = z.rows();
  nn::require_shape(z, B, c.latent, "decode latent");
  if (mode == DecodeMode::kSample && static_cast<int>(seeds.size()) != B) {
    throw Error(Errc::kInvalidArgument, "decode_batch: one seed per row");
  }
  if (c.vocab_size != vocab.size()) throw Error(Errc::kVocabularyMismatch, "model and vocabulary sizes differ");
  std::vector<std::mt19937_64> rngs;
  for (int b = 0; b < (mode == DecodeMode::kSample ? B : 0); ++b) rngs.emplace_back(seeds[b]);

  std::vector<chem::TokenSequence> out(B);
  std::vector<bool> done(B, false);
  for (auto& s : out) {
    s.ids = {vocab.bos_id()};
    s.max_len = max_len;
  }
  const std::vector<bool> allowed = emittable_mask(vocab);

  // The state lives outside the tape so each step starts from a fresh tape.
  std::vector<nn::Tensor> h;
  {
    nn::Tape tape;
    const BoundModel m(tape, params);
    for (const auto& v : decoder_init(m, tape.constant(z))) h.push_back(v.value());
  }
  int remaining = B;
  for (int t = 0; t <= max_len && remaining > 0; ++t) {
    nn::Tape tape;
    const BoundModel m(tape, params);
    DecoderState state;
    for (const auto& ht : h) state.push_back(tape.constant(ht));
    std::vector<int> inputs(B);
    for (int b = 0; b < B; ++b) inputs[b] = out[b].ids.back();
    const nn::Tensor lp = nn::log_softmax(decoder_step(m, state, inputs, tape.constant(z)), allowed).value();
    for (int l = 0; l < c.layers; ++l) h[l] = state[l].value();
    for (int b = 0; b < B; ++b) {
      if (done[b]) continue;
      int tok = -1;
      if (mode == DecodeMode::kGreedy) {
        for (int k = 0; k < vocab.size(); ++k) {
          if (allowed[k] && (tok < 0 || lp(b, k) > lp(b, tok))) tok = k;
        }
      } else {
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rngs[b]);
        double acc = 0.0;
        for (int k = 0; k < vocab.size(); ++k) {
          if (!allowed[k]) continue;
          tok = k;
          acc += std::exp(lp(b, k));
          if (u < acc) break;
        }
      }
      if (tok == vocab.eos_id()) {
        out[b].ids.push_back(tok);
        done[b] = true;
        --remaining;
      } else if (t == max_len) {
        out[b].truncated = true;
        done[b] = true;
        --remaining;
      } else {
        out[b].ids.push_back(tok);
      }
    }
  }
  return out;
}

chem::TokenSequence decode(const ModelParams& params, const std::vector<double>& z, DecodeMode mode,
                           std::mt19937_64& rng, const chem::Vocabulary& vocab, int max_len) {
  return decode_batch(params, nn::Tensor::row(z), mode, {rng()}, vocab, max_len).front();
}

std::vector<double> sequence_log_likelihoods(const ModelParams& params, const std::vector<chem::TokenSequence>& seqs,
                                             const nn::Tensor& z, const chem::Vocabulary& vocab) {
  nn::Tape tape;
  const BoundModel m(tape, params);
  const nn::Tensor logp = teacher_force(m, tape.constant(z), seqs, vocab).logp.value();
  return logp.values();
}

double sequence_log_likelihood(const ModelParams& params, const chem::TokenSequence& seq,
                               const std::vector<double>& z, const chem::Vocabulary& vocab) {
  return sequence_log_likelihoods(params, {seq}, nn::Tensor::row(z), vocab).front();
}

std::pair<nn::Tensor, nn::Tensor> encode_expression(const ModelParams& params, const nn::Tensor& profiles) {
  nn::Tape tape;
  const BoundModel m(tape, params);
  const Gaussian q = encode_expression(m, tape.constant(profiles));
  return {q.mu.value(), q.logvar.value()};
}

nn::Tensor sample_latents(const nn::Tensor& mu, const nn::Tensor& logvar, const std::vector<std::uint64_t>& seeds) {
  if (!mu.same_shape(logvar) || static_cast<int>(seeds.size()) != mu.rows()) {
    throw Error(Errc::kShapeMismatch, "sample_latents: shapes disagree");
  }
  nn::Tensor z(mu.rows(), mu.cols());
  for (int b = 0; b < mu.rows(); ++b) {
    std::mt19937_64 rng(seeds[b]);
    nn::Tape tape;
    const nn::Tensor row_mu(1, mu.cols(), std::vector<double>(mu.data() + b * mu.cols(), mu.data() + (b + 1) * mu.cols()));
    const nn::Tensor row_lv(1, mu.cols(),
                            std::vector<double>(logvar.data() + b * mu.cols(), logvar.data() + (b + 1) * mu.cols()));
    const nn::Tensor zb = reparameterize({tape.constant(row_mu), tape.constant(row_lv)}, rng).value();
    for (int j = 0; j < mu.cols(); ++j) z(b, j) = zb(0, j);
  }
  return z;
}

}  // namespace phenogen::gen
