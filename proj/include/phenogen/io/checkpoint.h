#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "phenogen/chem/vocabulary.h"
#include "phenogen/generator/model.h"

namespace phenogen::io {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  gen::ModelParams params;
  chem::Vocabulary vocab = chem::Vocabulary::default_vocabulary();
  std::map<std::string, std::string> meta;  // free-form: stage, parent hash, seed
};

/// Little-endian binary file; layout documented in docs/checkpoint_format.md.
/// Written atomically. Throws Error{kIoFailure}.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);

/// Verification order: magic and version (kVersionMismatch), trailing
/// checksum and structure (kCorruptFile), then the vocabulary hash against
/// `expected` when given (kVocabularyMismatch).
Checkpoint load_checkpoint(const std::filesystem::path& path, const chem::Vocabulary* expected = nullptr);

/// FNV-1a over tensor names, shapes and IEEE-754 bytes in name order.
std::uint64_t params_hash(const gen::ModelParams& params);

}  // namespace phenogen::io
