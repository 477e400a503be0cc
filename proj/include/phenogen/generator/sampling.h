#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "phenogen/chem/tokenizer.h"
#include "phenogen/chem/vocabulary.h"
#include "phenogen/generator/model.h"

namespace phenogen::gen {

enum class DecodeMode { kGreedy, kSample };

/// Autoregressive generation from BOS for each latent row. Row b draws from
/// its own generator seeded with `seeds[b]` (unused in greedy mode), so the
/// result does not depend on batch composition. A row stops at EOS; a row
/// that reaches `max_len` tokens without EOS is returned truncated.
std::vector<chem::TokenSequence> decode_batch(const ModelParams& params, const nn::Tensor& z, DecodeMode mode,
                                              const std::vector<std::uint64_t>& seeds,
                                              const chem::Vocabulary& vocab, int max_len);

chem::TokenSequence decode(const ModelParams& params, const std::vector<double>& z, DecodeMode mode,
                           std::mt19937_64& rng, const chem::Vocabulary& vocab, int max_len);

/// Teacher-forced Σ_t log p(a_t | a_<t, z), natural log.
double sequence_log_likelihood(const ModelParams& params, const chem::TokenSequence& seq,
                               const std::vector<double>& z, const chem::Vocabulary& vocab);

/// Same, for a batch with one latent row per sequence.
std::vector<double> sequence_log_likelihoods(const ModelParams& params, const std::vector<chem::TokenSequence>& seqs,
                                             const nn::Tensor& z, const chem::Vocabulary& vocab);

/// Encodes one expression profile per row into (μ, log σ²), without gradients.
std::pair<nn::Tensor, nn::Tensor> encode_expression(const ModelParams& params, const nn::Tensor& profiles);

/// z for each row using a per-row generator seeded with `seeds[b]`.
nn::Tensor sample_latents(const nn::Tensor& mu, const nn::Tensor& logvar, const std::vector<std::uint64_t>& seeds);

}  // namespace phenogen::gen
