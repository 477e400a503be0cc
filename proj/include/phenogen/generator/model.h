#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "phenogen/nn/tape.h"
#include "phenogen/nn/tensor.h"

namespace phenogen::gen {

/// Per-gene z-scores; length G is fixed per run.
using ExpressionProfile = std::vector<double>;

struct ModelConfig {
  int vocab_size = 40;
  int embed_dim = 16;
  int hidden = 32;
  int layers = 3;
  int latent = 16;
  int genes = 64;
  std::vector<int> exp_hidden = {64, 48, 32};
  double dropout = 0.1;
  int max_len = 100;

  /// Throws Error{kInvalidArgument} for non-positive sizes.
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

// Parameter name prefixes. Every tensor belongs to exactly one block.
inline constexpr std::string_view kMolEncoder = "mol_enc.";
inline constexpr std::string_view kMolDecoder = "mol_dec.";
inline constexpr std::string_view kExpEncoder = "exp_enc.";
inline constexpr std::string_view kExpDecoder = "exp_dec.";

bool in_block(const std::string& name, std::string_view prefix);

/// All learnable arrays of the expression VAE and the molecule VAE. Prior
/// and agent are two values of this type with identical shapes.
struct ModelParams {
  ModelConfig config;
  nn::ParamStore tensors;

  bool operator==(const ModelParams&) const = default;
};

/// Seeded uniform(±1/√fan_in) initialization; embeddings use ±0.1.
ModelParams init_params(const ModelConfig& config, std::uint64_t seed);

/// Tape view of a ModelParams. Tensors selected by `trainable` accumulate
/// gradients into `grads`; everything else enters the tape as a constant.
class BoundModel {
 public:
  using Filter = bool (*)(const std::string&);

  BoundModel(nn::Tape& tape, const ModelParams& params, nn::ParamStore* grads = nullptr,
             Filter trainable = nullptr);

  nn::Var operator[](const std::string& name) const;
  const ModelConfig& config() const noexcept { return *config_; }
  nn::Tape& tape() const noexcept { return *tape_; }

 private:
  nn::Tape* tape_;
  const ModelConfig* config_;
  std::map<std::string, nn::Var, std::less<>> vars_;
};

}  // namespace phenogen::gen
