#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "phenogen/chem/vocabulary.h"

namespace phenogen::chem {

inline constexpr int kDefaultMaxLen = 100;

/// Integer-encoded SMILES framed by BOS/EOS. A decoder that hits the length
/// cap produces a sequence without EOS and sets `truncated`.
struct TokenSequence {
  std::vector<int> ids;
  int max_len = kDefaultMaxLen;
  bool truncated = false;

  /// Number of tokens after BOS, including EOS when present.
  int generated_length() const noexcept { return static_cast<int>(ids.size()) - 1; }
  bool operator==(const TokenSequence&) const = default;
};

/// Splits `smiles` into vocabulary tokens by maximal munch. Bracket atoms and
/// `%nn` ring labels are single tokens.
/// Throws Error{kUnknownToken} for text outside the vocabulary and
/// Error{kTooLong} when the text exceeds `max_len` characters.
std::vector<int> split_tokens(std::string_view smiles, const Vocabulary& vocab,
                              int max_len = kDefaultMaxLen);

TokenSequence tokenize(std::string_view smiles, const Vocabulary& vocab,
                       int max_len = kDefaultMaxLen);

/// Concatenates the text of every non-framing token.
std::string detokenize(const TokenSequence& seq, const Vocabulary& vocab);

/// Checks the framing invariants: BOS first, EOS last unless truncated, no
/// framing tokens in between, and the length cap.
bool is_well_formed(const TokenSequence& seq, const Vocabulary& vocab);

}  // namespace phenogen::chem
