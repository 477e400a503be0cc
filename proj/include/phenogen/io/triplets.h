#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "phenogen/generator/training.h"

namespace phenogen::io {

struct SynthConfig {
  int genes = 64;
  std::uint64_t seed = 1;
  double noise = 0.1;   // standard deviation of the additive profile noise
  int cell_lines = 4;   // distinct unperturbed baselines, assigned round-robin
  int phi_dim = 8;      // width of the descriptor projection φ
};

/// Synthetic triplets with a learnable molecule → profile-delta map:
/// perturbed = unperturbed + W·φ(molecule) + noise, where φ is a fixed
/// random projection of the scaled descriptor vector. Throws
/// Error{kInvalidArgument} for an empty corpus or fewer than 8 genes.
std::vector<gen::TripletRecord> synth_triplets(const std::vector<std::string>& corpus, const SynthConfig& config);

/// W·φ(molecule) for one SMILES under `config`; the noise-free delta.
std::vector<double> synthetic_delta(const std::string& smiles, const SynthConfig& config);

/// File layout: header "G<TAB>count<TAB>seed" (seed "-" for imported data),
/// then one record per line: smiles, TAB, G space-separated floats, TAB,
/// G space-separated floats. Floats use 17 significant digits.
void write_triplets(const std::filesystem::path& path, const std::vector<gen::TripletRecord>& triplets,
                    int genes, std::optional<std::uint64_t> seed);

struct TripletFile {
  int genes = 0;
  std::optional<std::uint64_t> seed;
  std::vector<gen::TripletRecord> records;
};

/// Throws Error{kIoFailure} or Error{kParseFailure} naming the line, and
/// Error{kGeneCountMismatch} when a record disagrees with the header.
TripletFile read_triplets(const std::filesystem::path& path);

}  // namespace phenogen::io
