#pragma once

#include <cstdint>
#include <string>

#include "phenogen/generator/model.h"
#include "phenogen/generator/training.h"
#include "phenogen/reward/reward.h"
#include "phenogen/rl/trainer.h"

namespace phenogen::cli {

struct DataSettings {
  std::string corpus;           // empty: synthetic corpus of synth_corpus_size molecules
  int synth_corpus_size = 200;
  std::string triplets;         // empty: synthetic triplets over the corpus
  double synth_noise = 0.1;
  int cell_lines = 4;
  int profiles = 16;            // conditioning profiles taken from the first triplets
  std::string reference;        // novelty reference for evaluate; empty: none
};

struct OracleSettings {
  std::string kind = "mock";    // mock | external
  std::string spec;             // mock: pharmacophore file; empty uses the built-in toy spec
  std::uint64_t seed = 7;       // mock perturbation seed
  std::string command;          // external: template with {in} and {out}
  std::string workdir;          // external: empty means <out_dir>/oracle
  double timeout_s = 30.0;      // external: per molecule
};

struct SampleSettings {
  int n = 100;
  std::string mode = "sample";  // sample | greedy
  int retry_factor = 50;        // decode at most retry_factor·n candidates
  std::string checkpoint;       // empty: agent.ckpt in the output directory
};

/// Every tunable of a run. Loaded from strict JSON: unknown keys and
/// mistyped values are Error{kConfig} before any work starts.
struct RunConfig {
  std::uint64_t seed = 1;
  std::string out_dir = "phenogen_run";
  gen::ModelConfig model;       // vocab_size always follows the vocabulary
  DataSettings data;
  gen::TrainConfig pretrain;
  gen::TrainConfig joint;
  rl::TrainerConfig finetune;
  reward::RewardConfig reward;
  OracleSettings oracle;
  SampleSettings sample;

  RunConfig();

  static RunConfig from_json(const std::string& text);
  static RunConfig load(const std::string& path);

  /// Canonical JSON of every field; its FNV-1a is the manifest config hash.
  std::string to_json() const;

  /// Cross-field checks; throws Error{kConfig}.
  void validate() const;
};

}  // namespace phenogen::cli
