#include "phenogen/reward/oracle.h"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include "phenogen/chem/canonical.h"
#include "phenogen/chem/descriptors.h"
#include "phenogen/chem/smiles_parser.h"
#include "phenogen/chem/valence.h"
#include "phenogen/hash.h"

namespace phenogen::reward {

std::vector<OracleResult> DockingOracle::score_batch(const std::vector<std::string>& smiles) {
  submitted_ += static_cast<long>(smiles.size());
  if (smiles.empty()) return {};
  std::vector<OracleResult> out = do_score(smiles);
  out.resize(smiles.size(), OracleResult::fail(Errc::kParseFailure, "oracle returned too few results"));
  return out;
}

OracleResult DockingOracle::score(const std::string& smiles) { return score_batch({smiles}).front(); }

namespace {

[[noreturn]] void spec_error(int line, const std::string& what) {
  throw Error(Errc::kConfig, "pharmacophore spec line " + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& tok, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used == tok.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  spec_error(line, "bad number '" + tok + "'");
}

}  // namespace

PharmacophoreSpec PharmacophoreSpec::parse(const std::string& text) {
  PharmacophoreSpec spec;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream words(raw);
    std::vector<std::string> w;
    for (std::string t; words >> t;) w.push_back(t);
    if (w.empty()) continue;
    const std::string& kw = w[0];
    auto arity = [&](std::size_t lo, std::size_t hi) {
      if (w.size() < lo + 1 || w.size() > hi + 1) spec_error(line_no, "wrong number of fields for '" + kw + "'");
    };
    Feature f;
    if (kw == "base") {
      arity(1, 1);
      spec.base = parse_number(w[1], line_no);
      continue;
    }
    if (kw == "perturbation") {
      arity(1, 1);
      spec.perturbation = parse_number(w[1], line_no);
      if (spec.perturbation < 0) spec_error(line_no, "perturbation must be non-negative");
      continue;
    }
    if (kw == "element") {
      arity(2, 3);
      f.kind = Feature::Kind::kElement;
      f.arg = w[1];
      f.weight = parse_number(w[2], line_no);
      if (w.size() == 4) f.cap = parse_number(w[3], line_no);
    } else if (kw == "rings" || kw == "aromatic_rings") {
      arity(1, 2);
      f.kind = kw == "rings" ? Feature::Kind::kRings : Feature::Kind::kAromaticRings;
      f.weight = parse_number(w[1], line_no);
      if (w.size() == 3) f.cap = parse_number(w[2], line_no);
    } else if (kw == "mw_window") {
      arity(3, 3);
      f.kind = Feature::Kind::kMwWindow;
      f.lo = parse_number(w[1], line_no);
      f.hi = parse_number(w[2], line_no);
      f.weight = parse_number(w[3], line_no);
      if (f.lo > f.hi) spec_error(line_no, "empty MW window");
    } else if (kw == "motif") {
      arity(2, 2);
      f.kind = Feature::Kind::kMotif;
      f.arg = w[1];
      f.weight = parse_number(w[2], line_no);
    } else {
      spec_error(line_no, "unknown directive '" + kw + "'");
    }
    if (f.cap < 0) spec_error(line_no, "cap must be non-negative");
    spec.features.push_back(std::move(f));
  }
  return spec;
}

PharmacophoreSpec PharmacophoreSpec::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoFailure, "cannot read pharmacophore spec " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

MockOracle::MockOracle(std::uint64_t seed, PharmacophoreSpec spec) : seed_(seed), spec_(std::move(spec)) {}

double MockOracle::feature_sum(const std::string& smiles) const {
  const chem::MolGraph g = chem::parse_smiles(smiles);
  const chem::DescriptorVector d = chem::compute_descriptors(g);
  std::string key;
  double total = spec_.base;
  for (const Feature& f : spec_.features) {
    double value = 0.0;
    switch (f.kind) {
      case Feature::Kind::kElement:
        for (const auto& a : g.atoms) value += a.element == f.arg ? 1.0 : 0.0;
        break;
      case Feature::Kind::kRings: value = static_cast<double>(g.rings.size()); break;
      case Feature::Kind::kAromaticRings: value = d.arom_rings; break;
      case Feature::Kind::kMwWindow: value = d.mw >= f.lo && d.mw <= f.hi ? 1.0 : 0.0; break;
      case Feature::Kind::kMotif:
        if (key.empty()) key = chem::canonical_key(g);
        value = key.find(f.arg) != std::string::npos ? 1.0 : 0.0;
        break;
    }
    if (f.cap > 0) value = std::min(value, f.cap);
    total += value * f.weight;
  }
  return total;
}

std::vector<OracleResult> MockOracle::do_score(const std::vector<std::string>& smiles) {
  std::vector<OracleResult> out;
  for (const auto& s : smiles) {
    try {
      const chem::MolGraph g = chem::parse_smiles(s);
      if (!chem::check_valence(g).valid) {
        out.push_back(OracleResult::fail(Errc::kParseFailure, "valence violation"));
        continue;
      }
      const std::uint64_t h = derive_seed(seed_, fnv1a(chem::canonical_key(g)));
      const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
      out.push_back(OracleResult::ok(-feature_sum(s) + spec_.perturbation * (2.0 * u - 1.0)));
    } catch (const Error& e) {
      out.push_back(OracleResult::fail(Errc::kParseFailure, e.what()));
    }
  }
  return out;
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

std::string substitute(std::string text, const std::string& key, const std::string& value) {
  for (std::size_t at = text.find(key); at != std::string::npos; at = text.find(key, at + value.size())) {
    text.replace(at, key.size(), value);
  }
  return text;
}

std::vector<OracleResult> all(std::size_t n, Errc code, const std::string& why) {
  return std::vector<OracleResult>(n, OracleResult::fail(code, why));
}

}  // namespace

ExternalOracle::ExternalOracle(std::string command_template, std::filesystem::path workdir,
                               std::chrono::duration<double> per_molecule_timeout)
    : template_(std::move(command_template)), workdir_(std::move(workdir)), timeout_(per_molecule_timeout) {
  if (template_.find("{in}") == std::string::npos || template_.find("{out}") == std::string::npos) {
    throw Error(Errc::kConfig, "oracle command must contain {in} and {out}");
  }
  if (const char* env = std::getenv(kOracleTimeoutEnv); env && *env) {
    char* end = nullptr;
    const double secs = std::strtod(env, &end);
    if (*end != '\0' || !(secs > 0.0)) throw Error(Errc::kConfig, std::string(kOracleTimeoutEnv) + " must be a positive number");
    timeout_ = std::chrono::duration<double>(secs);
  }
  if (!(timeout_.count() > 0.0)) throw Error(Errc::kConfig, "oracle timeout must be positive");
  std::error_code ec;
  std::filesystem::create_directories(workdir_, ec);
  if (ec) throw Error(Errc::kIoFailure, "cannot create oracle workdir " + workdir_.string());
}

std::vector<OracleResult> ExternalOracle::do_score(const std::vector<std::string>& smiles) {
  const std::lock_guard<std::mutex> lock(mutex_);
  const std::size_t n = smiles.size();
  ++batch_;
  const auto in_path = workdir_ / ("ligands_" + std::to_string(batch_) + ".smi");
  const auto out_path = workdir_ / ("scores_" + std::to_string(batch_) + ".txt");
  const auto log_path = workdir_ / ("oracle_" + std::to_string(batch_) + ".log");
  std::filesystem::remove(out_path);
  {
    std::ofstream f(in_path, std::ios::binary | std::ios::trunc);
    for (const auto& s : smiles) f << s << '\n';
    if (!f) return all(n, Errc::kSpawnFailure, "cannot write " + in_path.string());
  }
  const std::string cmd =
      substitute(substitute(template_, "{in}", shell_quote(in_path.string())), "{out}", shell_quote(out_path.string()));

  const pid_t pid = fork();
  if (pid < 0) return all(n, Errc::kSpawnFailure, "fork failed");
  if (pid == 0) {
    setpgid(0, 0);
    const int fd = open(log_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd >= 0) {
      dup2(fd, STDOUT_FILENO);
      dup2(fd, STDERR_FILENO);
      close(fd);
    }
    execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(timeout_ * static_cast<double>(n));
  int status = 0;
  while (true) {
    const pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0) return all(n, Errc::kSpawnFailure, "waitpid failed");
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      return all(n, Errc::kTimeout, "oracle exceeded " + std::to_string(timeout_.count() * n) + " s");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return all(n, Errc::kSpawnFailure,
               code == 127 ? "oracle command not found" : "oracle exited with status " + std::to_string(code));
  }
  std::ifstream scores(out_path, std::ios::binary);
  if (!scores) return all(n, Errc::kParseFailure, "oracle wrote no score file");

  static const std::regex kLine(R"(^\s*score\s+(\d+)\s+([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*$)");
  std::vector<OracleResult> out = all(n, Errc::kParseFailure, "no score line for this molecule");
  std::vector<bool> seen(n, false);
  std::smatch m;
  for (std::string line; std::getline(scores, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!std::regex_match(line, m, kLine)) continue;
    const std::string digits = m[1].str();
    if (digits.size() > 9) continue;
    const std::size_t idx = std::stoul(digits);
    if (idx >= n || seen[idx]) continue;
    seen[idx] = true;
    const double v = std::strtod(m[2].str().c_str(), nullptr);
    out[idx] = std::isfinite(v) ? OracleResult::ok(v) : OracleResult::fail(Errc::kParseFailure, "non-finite score");
  }
  return out;
}

}  // namespace phenogen::reward
