#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace phenogen::chem {

inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kBosToken = "<bos>";
inline constexpr std::string_view kEosToken = "<eos>";

/// Token inventory for SMILES sequences. Ids are dense and equal to the
/// token's line number in the vocabulary file. The three framing tokens
/// are required and can never be produced by tokenizing chemistry text.
class Vocabulary {
 public:
  explicit Vocabulary(std::vector<std::string> tokens);

  static Vocabulary from_text(std::string_view text);
  static Vocabulary load(const std::filesystem::path& path);
  /// The vocabulary shipped in data/vocab.txt.
  static const Vocabulary& default_vocabulary();

  void save(const std::filesystem::path& path) const;
  std::string to_text() const;

  int size() const noexcept { return static_cast<int>(tokens_.size()); }
  int pad_id() const noexcept { return pad_id_; }
  int bos_id() const noexcept { return bos_id_; }
  int eos_id() const noexcept { return eos_id_; }
  bool is_special(int id) const noexcept {
    return id == pad_id_ || id == bos_id_ || id == eos_id_;
  }

  const std::string& token(int id) const;
  std::optional<int> id(std::string_view token) const;
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  /// Longest non-bracket token, used for maximal-munch tokenization.
  std::size_t max_plain_token_length() const noexcept { return max_plain_len_; }

  /// FNV-1a hash over the token list; stored in checkpoints.
  std::uint64_t hash() const noexcept;

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, int, std::less<>> index_;
  int pad_id_ = -1;
  int bos_id_ = -1;
  int eos_id_ = -1;
  std::size_t max_plain_len_ = 1;
};

}  // namespace phenogen::chem
