#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "phenogen/chem/vocabulary.h"

namespace phenogen::io {

struct CorpusLoad {
  std::vector<std::string> smiles;
  int skipped = 0;                    // lines rejected by validity or tokenization
  std::vector<std::string> warnings;  // one message per skipped line
};

/// Reads one SMILES per line (LF or CRLF, blank lines ignored) and keeps the
/// lines that parse, pass the valence check and tokenize under `vocab`
/// within `max_len`. Order is preserved. Throws Error{kIoFailure} when the
/// file cannot be read and Error{kEmptyAfterFiltering} when nothing is left.
CorpusLoad load_corpus(const std::filesystem::path& path, const chem::Vocabulary& vocab = chem::Vocabulary::default_vocabulary(),
                       int max_len = 100);

/// Same filtering applied to lines already in memory.
CorpusLoad filter_corpus(const std::vector<std::string>& lines, const chem::Vocabulary& vocab, int max_len);

/// `n` distinct valid molecules assembled from ring cores, linkers and
/// substituents. Pure function of (n, seed).
std::vector<std::string> synth_corpus(int n, std::uint64_t seed);

/// Writes one SMILES per line with LF endings.
void write_smiles_file(const std::filesystem::path& path, const std::vector<std::string>& smiles);

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partial file. Throws Error{kIoFailure}.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace phenogen::io
