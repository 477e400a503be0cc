#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace phenogen::chem {

/// Parses the shared "key value" record format: one record per line,
/// whitespace separated, `#` starts a comment. The value keeps everything
/// after the key with surrounding whitespace removed.
std::vector<std::pair<std::string, std::string>> parse_records(std::string_view text);

/// Reads a data file from disk, or the embedded copy when `path` is a bare
/// file name that was compiled in.
std::string read_data_text(const std::filesystem::path& path);

class NumericTable {
 public:
  NumericTable() = default;
  static NumericTable from_text(std::string_view text);

  std::optional<double> find(std::string_view key) const;
  const std::map<std::string, double, std::less<>>& entries() const noexcept { return entries_; }
  void set(std::string key, double value) { entries_[std::move(key)] = value; }

 private:
  std::map<std::string, double, std::less<>> entries_;
};

class ValenceTable {
 public:
  ValenceTable() = default;
  static ValenceTable from_text(std::string_view text);

  /// Ascending allowed valences for an element; empty if unknown.
  const std::vector<int>& allowed(std::string_view element) const;

 private:
  std::map<std::string, std::vector<int>, std::less<>> entries_;
};

/// All chemistry tables in one bundle. `defaults()` is built once from the
/// embedded data files and is immutable afterwards.
struct ChemTables {
  NumericTable masses;
  ValenceTable valences;
  NumericTable logp;
  NumericTable psa;

  static const ChemTables& defaults();
  static ChemTables load(const std::filesystem::path& dir);
};

}  // namespace phenogen::chem
