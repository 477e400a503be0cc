#include "phenogen/chem/tables.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "phenogen/chem/embedded_data.h"
#include "phenogen/error.h"

namespace phenogen::chem {
namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    double v = std::stod(std::string(value), &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::kInvalidArgument, "bad numeric value '" + std::string(value) + "' for " + std::string(key));
  }
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_records(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto split = line.find_first_of(" \t");
    if (split == std::string_view::npos) {
      throw Error(Errc::kInvalidArgument, "record without value: '" + std::string(line) + "'");
    }
    out.emplace_back(std::string(line.substr(0, split)), std::string(trim(line.substr(split))));
  }
  return out;
}

std::string read_data_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (in) {
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  if (!path.has_parent_path()) {
    if (const std::string* text = embedded_data_file(path.string())) return *text;
  }
  throw Error(Errc::kIoFailure, "cannot read data file " + path.string());
}

NumericTable NumericTable::from_text(std::string_view text) {
  NumericTable t;
  for (auto& [k, v] : parse_records(text)) t.entries_[k] = parse_double(k, v);
  return t;
}

std::optional<double> NumericTable::find(std::string_view key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

ValenceTable ValenceTable::from_text(std::string_view text) {
  ValenceTable t;
  for (auto& [k, v] : parse_records(text)) {
    std::vector<int> vals;
    std::string_view rest = v;
    while (!rest.empty()) {
      auto comma = rest.find(',');
      std::string_view item = trim(rest.substr(0, comma));
      int n = 0;
      auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), n);
      if (ec != std::errc() || p != item.data() + item.size() || n <= 0) {
        throw Error(Errc::kInvalidArgument, "bad valence list '" + v + "' for " + k);
      }
      if (!vals.empty() && n <= vals.back()) {
        throw Error(Errc::kInvalidArgument, "valences for " + k + " must be ascending");
      }
      vals.push_back(n);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    t.entries_[k] = std::move(vals);
  }
  return t;
}

const std::vector<int>& ValenceTable::allowed(std::string_view element) const {
  static const std::vector<int> kNone;
  auto it = entries_.find(element);
  return it == entries_.end() ? kNone : it->second;
}

const ChemTables& ChemTables::defaults() {
  static const ChemTables tables = [] {
    ChemTables t;
    t.masses = NumericTable::from_text(*embedded_data_file("atomic_masses.txt"));
    t.valences = ValenceTable::from_text(*embedded_data_file("valences.txt"));
    t.logp = NumericTable::from_text(*embedded_data_file("logp_contrib.txt"));
    t.psa = NumericTable::from_text(*embedded_data_file("psa_contrib.txt"));
    return t;
  }();
  return tables;
}

ChemTables ChemTables::load(const std::filesystem::path& dir) {
  ChemTables t;
  t.masses = NumericTable::from_text(read_data_text(dir / "atomic_masses.txt"));
  t.valences = ValenceTable::from_text(read_data_text(dir / "valences.txt"));
  t.logp = NumericTable::from_text(read_data_text(dir / "logp_contrib.txt"));
  t.psa = NumericTable::from_text(read_data_text(dir / "psa_contrib.txt"));
  return t;
}

}  // namespace phenogen::chem
