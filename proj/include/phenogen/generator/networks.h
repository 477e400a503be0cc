#pragma once

#include <random>
#include <vector>

#include "phenogen/chem/tokenizer.h"
#include "phenogen/chem/vocabulary.h"
#include "phenogen/generator/model.h"

namespace phenogen::gen {

/// Diagonal Gaussian over the latent space, one row per example.
struct Gaussian {
  nn::Var mu;
  nn::Var logvar;
};

/// Dropout source for training passes; a null rng or zero rate disables it.
struct DropoutCtx {
  double rate = 0.0;
  std::mt19937_64* rng = nullptr;
  bool active() const noexcept { return rng != nullptr && rate > 0.0; }
};

/// ExpVAE encoder: tanh FFN stack followed by separate μ and log σ² heads.
/// `profiles` is B×G.
Gaussian encode_expression(const BoundModel& m, nn::Var profiles, DropoutCtx drop = {});

/// ExpVAE decoder: reconstructs a B×G profile delta from B×d latents.
nn::Var decode_profile(const BoundModel& m, nn::Var z, DropoutCtx drop = {});

/// MolVAE encoder: forward and backward GRU stacks over the tokens between
/// BOS and EOS; the final top-layer states are concatenated and projected.
Gaussian encode_molecules(const BoundModel& m, const std::vector<chem::TokenSequence>& seqs,
                          DropoutCtx drop = {});

/// z = μ + exp(log σ²/2) ⊙ ε with ε ~ N(0, I) drawn from `rng`. Entries with
/// log σ² < −40 take z = μ exactly.
nn::Var reparameterize(Gaussian q, std::mt19937_64& rng);

/// Per-row KL(q ‖ N(0, I)) = 0.5 Σ (exp(lv) + μ² − 1 − lv), B×1.
nn::Var gaussian_kl(Gaussian q);

/// Per-row KL(q ‖ p) between diagonal Gaussians, B×1.
nn::Var gaussian_kl_between(Gaussian q, Gaussian p);

/// Classes the decoder may emit: everything except PAD and BOS.
std::vector<bool> emittable_mask(const chem::Vocabulary& vocab);

/// Decoder hidden state, one B×H variable per layer.
using DecoderState = std::vector<nn::Var>;

/// h0 of every layer as an affine map of z.
DecoderState decoder_init(const BoundModel& m, nn::Var z);

/// One decoder step: embeds `tokens`, concatenates z, runs the GRU stack
/// and returns B×|V| logits; `state` is advanced in place.
nn::Var decoder_step(const BoundModel& m, DecoderState& state, const std::vector<int>& tokens, nn::Var z,
                     DropoutCtx drop = {});

/// Teacher-forced pass over framed sequences.
struct TeacherForced {
  nn::Var logp;     // B×1, Σ_t log p(a_t | a_<t, z)
  nn::Var entropy;  // B×1, Σ_t H(p(· | a_<t, z))
};

TeacherForced teacher_force(const BoundModel& m, nn::Var z, const std::vector<chem::TokenSequence>& seqs,
                            const chem::Vocabulary& vocab, DropoutCtx drop = {});

}  // namespace phenogen::gen
