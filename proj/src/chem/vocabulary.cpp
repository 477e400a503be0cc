#include "phenogen/chem/vocabulary.h"

#include <fstream>
#include <sstream>

#include "phenogen/chem/embedded_data.h"
#include "phenogen/error.h"
#include "phenogen/hash.h"

namespace phenogen::chem {

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (int i = 0; i < size(); ++i) {
    const std::string& t = tokens_[i];
    if (t.empty()) {
      throw Error(Errc::kInvalidArgument, "vocabulary line " + std::to_string(i) + " is empty");
    }
    if (!index_.emplace(t, i).second) {
      throw Error(Errc::kInvalidArgument, "duplicate vocabulary token '" + t + "'");
    }
    if (t.front() != '[' && t.front() != '<' && t.size() > max_plain_len_) max_plain_len_ = t.size();
  }
  auto require = [&](std::string_view name) {
    auto found = id(name);
    if (!found) throw Error(Errc::kInvalidArgument, "vocabulary lacks " + std::string(name));
    return *found;
  };
  pad_id_ = require(kPadToken);
  bos_id_ = require(kBosToken);
  eos_id_ = require(kEosToken);
}

Vocabulary Vocabulary::from_text(std::string_view text) {
  std::vector<std::string> tokens;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == EOF) break;
    tokens.push_back(line);
  }
  return Vocabulary(std::move(tokens));
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoFailure, "cannot open vocabulary " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

const Vocabulary& Vocabulary::default_vocabulary() {
  static const Vocabulary vocab = from_text(*embedded_data_file("vocab.txt"));
  return vocab;
}

std::string Vocabulary::to_text() const {
  std::string out;
  for (const auto& t : tokens_) {
    out += t;
    out += '\n';
  }
  return out;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  out << to_text();
  if (!out) throw Error(Errc::kIoFailure, "cannot write vocabulary " + path.string());
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) throw Error(Errc::kInvalidArgument, "token id out of range: " + std::to_string(id));
  return tokens_[id];
}

std::optional<int> Vocabulary::id(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Vocabulary::hash() const noexcept {
  std::uint64_t h = kFnvOffset;
  for (const auto& t : tokens_) {
    h = fnv1a(t, h);
    h = fnv1a(std::string_view("\n"), h);
  }
  return h;
}

}  // namespace phenogen::chem
