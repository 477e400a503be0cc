#include "phenogen/metrics/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include <json.hpp>

#include "phenogen/chem/canonical.h"
#include "phenogen/chem/qed.h"
#include "phenogen/chem/smiles_parser.h"
#include "phenogen/chem/valence.h"
#include "phenogen/error.h"

namespace phenogen::metrics {
namespace {

struct Parsed {
  bool valid = false;
  std::string key;
  chem::MolGraph graph;
};

Parsed parse_one(const std::string& s) {
  Parsed p;
  try {
    p.graph = chem::parse_smiles(s);
    if (!chem::check_valence(p.graph).valid) return p;
    p.key = chem::canonical_key(p.graph);
    p.valid = true;
  } catch (const Error&) {
  }
  return p;
}

// Distinct valid molecules keyed by canonical key, each with its graph.
std::map<std::string, chem::MolGraph> distinct_valid(const std::vector<std::string>& smiles) {
  std::map<std::string, chem::MolGraph> out;
  for (const auto& s : smiles) {
    Parsed p = parse_one(s);
    if (p.valid) out.try_emplace(p.key, std::move(p.graph));
  }
  return out;
}

double mean_pairwise_tanimoto(const std::vector<chem::BitVector>& fps) {
  const std::size_t n = fps.size();
  long double sum = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) sum += chem::tanimoto(fps[i], fps[j]);
  }
  return static_cast<double>(sum / (static_cast<long double>(n) * (n - 1) / 2.0L));
}

double percentile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

template <typename T>
nlohmann::json opt(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json summary_json(const std::optional<Summary>& s) {
  if (!s) return nullptr;
  return {{"count", s->count}, {"mean", s->mean}, {"median", s->median}, {"p90", s->p90}};
}

std::string fmt(const std::optional<double>& v, const char* spec = "%.4f") {
  if (!v) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, *v);
  return buf;
}

std::string fmt_bool(const std::optional<bool>& v) { return v ? (*v ? "yes" : "no") : "-"; }

void write_tmp(const std::filesystem::path& tmp, const std::string& content) {
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIoFailure, "cannot write " + tmp.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(Errc::kIoFailure, "short write to " + tmp.string());
}

}  // namespace

double validity_rate(const std::vector<std::string>& smiles) {
  if (smiles.empty()) throw Error(Errc::kEmptyInput, "validity_rate: empty list");
  std::size_t valid = 0;
  for (const auto& s : smiles) valid += parse_one(s).valid ? 1 : 0;
  return static_cast<double>(valid) / static_cast<double>(smiles.size());
}

double uniqueness_rate(const std::vector<std::string>& smiles) {
  std::set<std::string> keys;
  std::size_t valid = 0;
  for (const auto& s : smiles) {
    const Parsed p = parse_one(s);
    if (!p.valid) continue;
    ++valid;
    keys.insert(p.key);
  }
  if (valid == 0) throw Error(Errc::kNoValidMolecules, "uniqueness_rate: no valid molecules");
  return static_cast<double>(keys.size()) / static_cast<double>(valid);
}

std::set<std::string> reference_keys(const std::vector<std::string>& corpus) {
  std::set<std::string> keys;
  for (const auto& s : corpus) {
    const Parsed p = parse_one(s);
    if (p.valid) keys.insert(p.key);
  }
  return keys;
}

double novelty_rate(const std::vector<std::string>& generated, const std::set<std::string>& reference) {
  const auto mols = distinct_valid(generated);
  if (mols.empty()) throw Error(Errc::kNoValidMolecules, "novelty_rate: no valid molecules");
  if (reference.empty()) return 1.0;
  std::size_t novel = 0;
  for (const auto& [key, g] : mols) novel += reference.count(key) ? 0 : 1;
  return static_cast<double>(novel) / static_cast<double>(mols.size());
}

double internal_diversity(const std::vector<std::string>& smiles, int n_bits, bool dedup) {
  std::vector<chem::BitVector> fps;
  if (dedup) {
    for (const auto& [key, g] : distinct_valid(smiles)) fps.push_back(chem::fingerprint(g, n_bits));
  } else {
    for (const auto& s : smiles) {
      const Parsed p = parse_one(s);
      if (p.valid) fps.push_back(chem::fingerprint(p.graph, n_bits));
    }
  }
  if (fps.size() < 2) {
    throw Error(Errc::kTooFewMolecules, "internal_diversity: need at least two valid molecules, got " +
                                             std::to_string(fps.size()));
  }
  return 1.0 - mean_pairwise_tanimoto(fps);
}

bool lipinski_pass(const chem::DescriptorVector& d) {
  return d.logp_proxy < 5.0 && d.mw < 500.0 && d.hbd < 5 && d.hba < 10;
}

std::optional<Summary> summarize(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  long double sum = 0.0L;
  for (double v : values) sum += v;
  Summary s;
  s.count = static_cast<int>(values.size());
  s.mean = static_cast<double>(sum / static_cast<long double>(values.size()));
  s.median = percentile(values, 0.5);
  s.p90 = percentile(values, 0.9);
  return s;
}

EvalReport evaluate(const std::vector<std::string>& generated, const std::optional<std::set<std::string>>& reference,
                    const std::vector<reward::RewardRecord>* rewards) {
  if (generated.empty()) throw Error(Errc::kEmptyInput, "evaluate: empty list");
  if (rewards && rewards->size() != generated.size()) {
    throw Error(Errc::kInvalidArgument, "evaluate: reward records must be parallel to the molecules");
  }
  EvalReport r;
  r.n_generated = static_cast<int>(generated.size());
  r.has_reference = reference.has_value();

  struct Slot {
    MoleculeRow row;
  };
  std::map<std::string, Slot> valid_rows, invalid_rows;
  for (std::size_t i = 0; i < generated.size(); ++i) {
    const std::string& s = generated[i];
    Parsed p = parse_one(s);
    auto& table = p.valid ? valid_rows : invalid_rows;
    auto [it, fresh] = table.try_emplace(p.valid ? p.key : s);
    Slot& slot = it->second;
    ++slot.row.count;
    if (p.valid) ++r.n_valid;
    // The lexicographically smallest spelling represents the row, so the
    // table does not depend on input order.
    if (fresh || s < slot.row.smiles) {
      slot.row.smiles = s;
      slot.row.valid = p.valid;
      slot.row.key = p.key;
    }
    if (rewards && p.valid) {
      const reward::RewardRecord& rec = (*rewards)[i];
      // Oracle results are a function of the key; a retry may fill a gap.
      if (rec.raw_dock && !slot.row.raw_dock) {
        slot.row.raw_dock = rec.raw_dock;
        slot.row.dock = rec.dock;
        slot.row.reward = rec.reward;
      }
    }
  }
  r.validity_rate = static_cast<double>(r.n_valid) / static_cast<double>(r.n_generated);

  std::vector<double> qeds, docks, raw_rewards;
  std::vector<chem::BitVector> fps;
  int lipinski = 0, novel = 0;
  for (auto& [key, slot] : valid_rows) {
    MoleculeRow& row = slot.row;
    // Floating-point sums follow atom order, so descriptors come from the
    // representative spelling rather than whichever copy arrived first.
    const chem::MolGraph graph = chem::parse_smiles(row.smiles);
    const chem::DescriptorVector d = chem::compute_descriptors(graph);
    row.qed = chem::qed(d);
    row.mw = d.mw;
    row.logp = d.logp_proxy;
    row.hbd = d.hbd;
    row.hba = d.hba;
    row.lipinski = lipinski_pass(d);
    if (reference) row.novel = reference->empty() || reference->count(key) == 0;
    qeds.push_back(*row.qed);
    if (row.raw_dock) docks.push_back(*row.raw_dock);
    if (row.reward) raw_rewards.push_back(*row.reward);
    lipinski += *row.lipinski ? 1 : 0;
    novel += row.novel.value_or(false) ? 1 : 0;
    fps.push_back(chem::fingerprint(graph));
    r.molecules.push_back(row);
  }
  for (auto& [text, slot] : invalid_rows) r.molecules.push_back(slot.row);

  if (r.n_valid > 0) {
    const double distinct = static_cast<double>(valid_rows.size());
    r.uniqueness_rate = distinct / static_cast<double>(r.n_valid);
    // Without a reference every molecule counts as novel; has_reference flags it.
    r.novelty_rate = reference ? static_cast<double>(novel) / distinct : 1.0;
    r.lipinski_pass_rate = static_cast<double>(lipinski) / distinct;
  }
  r.qed = summarize(qeds);
  r.dock = summarize(docks);
  r.reward = summarize(raw_rewards);
  if (fps.size() >= 2) r.internal_diversity = 1.0 - mean_pairwise_tanimoto(fps);
  return r;
}

std::string report_json(const EvalReport& r) {
  nlohmann::json mols = nlohmann::json::array();
  for (const auto& m : r.molecules) {
    mols.push_back({{"key", m.valid ? nlohmann::json(m.key) : nlohmann::json(nullptr)},
                    {"smiles", m.smiles},
                    {"count", m.count},
                    {"valid", m.valid},
                    {"qed", opt(m.qed)},
                    {"mw", opt(m.mw)},
                    {"logp", opt(m.logp)},
                    {"hbd", opt(m.hbd)},
                    {"hba", opt(m.hba)},
                    {"lipinski", opt(m.lipinski)},
                    {"novel", opt(m.novel)},
                    {"raw_dock", opt(m.raw_dock)},
                    {"dock", opt(m.dock)},
                    {"reward", opt(m.reward)},
                    {"sa", nullptr}});
  }
  nlohmann::json j = {{"schema_version", kReportSchemaVersion},
                      {"n_generated", r.n_generated},
                      {"n_valid", r.n_valid},
                      {"validity_rate", r.validity_rate},
                      {"uniqueness_rate", opt(r.uniqueness_rate)},
                      {"novelty_rate", opt(r.novelty_rate)},
                      {"has_reference", r.has_reference},
                      {"qed", summary_json(r.qed)},
                      {"dock", summary_json(r.dock)},
                      {"reward", summary_json(r.reward)},
                      {"lipinski_pass_rate", opt(r.lipinski_pass_rate)},
                      {"internal_diversity", opt(r.internal_diversity)},
                      {"sa", nullptr},
                      {"molecules", std::move(mols)}};
  return j.dump(2) + "\n";
}

std::string report_table(const EvalReport& r) {
  std::string out;
  char line[256];
  auto row = [&](const char* name, const std::string& value) {
    std::snprintf(line, sizeof line, "%-20s %s\n", name, value.c_str());
    out += line;
  };
  auto summary = [](const std::optional<Summary>& s) {
    if (!s) return std::string("-");
    char buf[160];
    std::snprintf(buf, sizeof buf, "mean %.4f  median %.4f  p90 %.4f  (n=%d)", s->mean, s->median, s->p90, s->count);
    return std::string(buf);
  };
  row("n_generated", std::to_string(r.n_generated));
  row("n_valid", std::to_string(r.n_valid));
  row("validity_rate", fmt(r.validity_rate));
  row("uniqueness_rate", fmt(r.uniqueness_rate));
  row("novelty_rate", r.has_reference ? fmt(r.novelty_rate) : fmt(r.novelty_rate) + " (no reference)");
  row("qed", summary(r.qed));
  row("dock", summary(r.dock));
  row("reward", summary(r.reward));
  row("lipinski_pass_rate", fmt(r.lipinski_pass_rate));
  row("internal_diversity", fmt(r.internal_diversity));
  row("sa", "-");
  out += "\n";

  std::size_t kw = 6;
  for (const auto& m : r.molecules) kw = std::max(kw, m.smiles.size());
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"smiles", "count", "valid", "qed", "mw", "logp", "hbd", "hba", "lipinski", "novel", "raw_dock",
                   "dock", "reward"});
  for (const auto& m : r.molecules) {
    auto opt_int = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string("-"); };
    cells.push_back({m.smiles, std::to_string(m.count), m.valid ? "yes" : "no", fmt(m.qed), fmt(m.mw, "%.2f"),
                     fmt(m.logp, "%.3f"), opt_int(m.hbd), opt_int(m.hba), fmt_bool(m.lipinski), fmt_bool(m.novel),
                     fmt(m.raw_dock, "%.3f"), fmt(m.dock), fmt(m.reward)});
  }
  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto& c : cells) {
    for (std::size_t i = 0; i < c.size(); ++i) width[i] = std::max(width[i], c[i].size());
  }
  for (const auto& c : cells) {
    std::string l;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::size_t pad = width[i] - c[i].size();
      // SMILES left-aligned, numbers right-aligned.
      l += i == 0 ? c[i] + std::string(pad, ' ') : std::string(pad, ' ') + c[i];
      if (i + 1 < c.size()) l += "  ";
    }
    out += l + "\n";
  }
  return out;
}

void emit_report(const EvalReport& report, const std::filesystem::path& json_path,
                 const std::filesystem::path& table_path) {
  if (report.molecules.empty()) throw Error(Errc::kIoFailure, "emit_report: the report has no molecules");
  std::filesystem::path json_tmp = json_path, table_tmp = table_path;
  json_tmp += ".tmp";
  table_tmp += ".tmp";
  std::error_code ec;
  try {
    write_tmp(json_tmp, report_json(report));
    write_tmp(table_tmp, report_table(report));
  } catch (const Error&) {
    std::filesystem::remove(json_tmp, ec);
    std::filesystem::remove(table_tmp, ec);
    throw;
  }
  std::filesystem::rename(json_tmp, json_path, ec);
  if (ec) {
    std::filesystem::remove(json_tmp, ec);
    std::filesystem::remove(table_tmp, ec);
    throw Error(Errc::kIoFailure, "cannot move report into " + json_path.string());
  }
  std::filesystem::rename(table_tmp, table_path, ec);
  if (ec) {
    std::filesystem::remove(json_path, ec);
    std::filesystem::remove(table_tmp, ec);
    throw Error(Errc::kIoFailure, "cannot move report into " + table_path.string());
  }
}

}  // namespace phenogen::metrics
