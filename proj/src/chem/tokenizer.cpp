#include "phenogen/chem/tokenizer.h"

#include "phenogen/error.h"

namespace phenogen::chem {

std::vector<int> split_tokens(std::string_view smiles, const Vocabulary& vocab, int max_len) {
  if (smiles.empty()) throw Error(Errc::kInvalidArgument, "empty SMILES");
  if (static_cast<int>(smiles.size()) > max_len) {
    throw Error(Errc::kTooLong, std::to_string(smiles.size()) + " characters exceeds limit " +
                                    std::to_string(max_len));
  }
  std::vector<int> ids;
  std::size_t pos = 0;
  auto unknown = [&](std::string_view what) {
    return Error(Errc::kUnknownToken, "'" + std::string(what) + "' at position " + std::to_string(pos) +
                                          " in '" + std::string(smiles) + "'");
  };
  while (pos < smiles.size()) {
    std::size_t len = 0;
    if (smiles[pos] == '[') {
      auto close = smiles.find(']', pos);
      if (close == std::string_view::npos) throw unknown(smiles.substr(pos));
      len = close - pos + 1;
    } else if (smiles[pos] == '%') {
      len = 3;
    } else {
      // maximal munch over the plain tokens (Cl before C, Br before B)
      for (std::size_t l = std::min(vocab.max_plain_token_length(), smiles.size() - pos); l > 1; --l) {
        if (vocab.id(smiles.substr(pos, l))) {
          len = l;
          break;
        }
      }
      if (len == 0) len = 1;
    }
    std::string_view piece = smiles.substr(pos, len);
    auto id = vocab.id(piece);
    if (!id || vocab.is_special(*id)) throw unknown(piece);
    ids.push_back(*id);
    pos += len;
  }
  return ids;
}

TokenSequence tokenize(std::string_view smiles, const Vocabulary& vocab, int max_len) {
  TokenSequence seq;
  seq.max_len = max_len;
  seq.ids.push_back(vocab.bos_id());
  for (int id : split_tokens(smiles, vocab, max_len)) seq.ids.push_back(id);
  seq.ids.push_back(vocab.eos_id());
  return seq;
}

std::string detokenize(const TokenSequence& seq, const Vocabulary& vocab) {
  std::string out;
  for (int id : seq.ids) {
    if (vocab.is_special(id)) continue;
    out += vocab.token(id);
  }
  return out;
}

bool is_well_formed(const TokenSequence& seq, const Vocabulary& vocab) {
  const int n = static_cast<int>(seq.ids.size());
  if (n < 1 || n > seq.max_len + 2) return false;
  if (seq.ids.front() != vocab.bos_id()) return false;
  const int body_end = seq.truncated ? n : n - 1;
  if (!seq.truncated && (n < 2 || seq.ids.back() != vocab.eos_id())) return false;
  for (int i = 1; i < body_end; ++i) {
    if (seq.ids[i] < 0 || seq.ids[i] >= vocab.size() || vocab.is_special(seq.ids[i])) return false;
  }
  return true;
}

}  // namespace phenogen::chem
