#pragma once

#include <stdexcept>
#include <string>

namespace phenogen {

/// Error categories shared by every module. The CLI maps these onto exit
/// codes, so new categories must be added to `exit_code_for` as well.
enum class Errc {
  kInvalidArgument,
  kUnknownToken,
  kTooLong,
  kSyntax,
  kDegenerateParams,
  kShapeMismatch,
  kNonFinite,
  kGraphCycle,
  kEmptyCorpus,
  kDivergedLoss,
  kGeneCountMismatch,
  kNonNegativeK,
  kSpawnFailure,
  kTimeout,
  kParseFailure,
  kOracleUnavailable,
  kEmptyInput,
  kNoValidMolecules,
  kTooFewMolecules,
  kIoFailure,
  kEmptyAfterFiltering,
  kVersionMismatch,
  kVocabularyMismatch,
  kCorruptFile,
  kConfig,
  kRetryCapExceeded,
};

const char* errc_name(Errc code) noexcept;

/// Process exit status for an error: 3 for oracle failures, 4 for numeric
/// divergence, 2 for everything else (usage and input problems).
int exit_code_for(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace phenogen
