#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "phenogen/chem/vocabulary.h"
#include "phenogen/generator/model.h"

namespace phenogen::gen {

struct TrainConfig {
  int epochs = 30;
  int batch_size = 64;
  double lr = 5e-4;
  /// Share of all optimizer steps over which the KL weight ramps from 0 to 1.
  double kl_anneal_fraction = 1.0 / 3.0;
  std::uint64_t seed = 1;
};

/// One line of a loss log: epoch (1-based), term name, epoch mean.
struct LossRecord {
  int epoch = 0;
  std::string term;
  double value = 0.0;
};

std::string format_loss_log(const std::vector<LossRecord>& log);

struct TrainResult {
  ModelParams params;
  std::vector<LossRecord> log;
};

/// A SMILES string with its perturbed and unperturbed expression profiles.
struct TripletRecord {
  std::string smiles;
  std::vector<double> perturbed;
  std::vector<double> unperturbed;
  std::string provenance = "synthetic";

  bool operator==(const TripletRecord&) const = default;
};

/// Perturbed minus unperturbed: the signal the expression VAE encodes.
std::vector<double> profile_delta(const TripletRecord& t);

/// KL weight after `step` of `total` optimizer steps.
double kl_weight(long step, long total, double anneal_fraction);

/// Trains the molecule VAE (encoder and decoder) on token NLL + annealed KL.
/// Logged terms per epoch: recon_nll, kl, kl_weight, total. Throws
/// Error{kEmptyCorpus} for an empty corpus and Error{kDivergedLoss} if a
/// loss or gradient stops being finite.
TrainResult pretrain_molvae(const std::vector<std::string>& corpus, const ModelParams& init,
                            const TrainConfig& config, const chem::Vocabulary& vocab);

/// Trains the expression VAE and the molecule decoder on triplets while the
/// molecule encoder stays frozen: the expression latent must reconstruct the
/// molecule and the profile delta, and its posterior is pulled towards the
/// frozen molecule posterior. Logged terms: recon_nll, profile_mse, kl_prior,
/// kl_align, kl_weight, total. Throws Error{kGeneCountMismatch} when a
/// profile length differs from the model's gene count.
TrainResult joint_train(const std::vector<TripletRecord>& triplets, const ModelParams& molvae,
                        const TrainConfig& config, const chem::Vocabulary& vocab);

}  // namespace phenogen::gen
