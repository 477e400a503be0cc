#include "phenogen/error.h"

namespace phenogen {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kUnknownToken: return "UnknownToken";
    case Errc::kTooLong: return "TooLong";
    case Errc::kSyntax: return "SyntaxError";
    case Errc::kDegenerateParams: return "DegenerateParams";
    case Errc::kShapeMismatch: return "ShapeMismatch";
    case Errc::kNonFinite: return "NonFinite";
    case Errc::kGraphCycle: return "GraphCycle";
    case Errc::kEmptyCorpus: return "EmptyCorpus";
    case Errc::kDivergedLoss: return "DivergedLoss";
    case Errc::kGeneCountMismatch: return "GeneCountMismatch";
    case Errc::kNonNegativeK: return "NonNegativeK";
    case Errc::kSpawnFailure: return "SpawnFailure";
    case Errc::kTimeout: return "Timeout";
    case Errc::kParseFailure: return "ParseFailure";
    case Errc::kOracleUnavailable: return "OracleUnavailable";
    case Errc::kEmptyInput: return "EmptyInput";
    case Errc::kNoValidMolecules: return "NoValidMolecules";
    case Errc::kTooFewMolecules: return "TooFewMolecules";
    case Errc::kIoFailure: return "IoFailure";
    case Errc::kEmptyAfterFiltering: return "EmptyAfterFiltering";
    case Errc::kVersionMismatch: return "VersionMismatch";
    case Errc::kVocabularyMismatch: return "VocabularyMismatch";
    case Errc::kCorruptFile: return "CorruptFile";
    case Errc::kConfig: return "ConfigError";
    case Errc::kRetryCapExceeded: return "RetryCapExceeded";
  }
  return "Unknown";
}

int exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::kOracleUnavailable:
    case Errc::kSpawnFailure:
    case Errc::kTimeout:
      return 3;
    case Errc::kDivergedLoss:
    case Errc::kNonFinite:
      return 4;
    default:
      return 2;
  }
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

}  // namespace phenogen
