#include "phenogen/cli/commands.h"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "phenogen/chem/canonical.h"
#include "phenogen/chem/smiles_parser.h"
#include "phenogen/chem/tokenizer.h"
#include "phenogen/chem/valence.h"
#include "phenogen/error.h"
#include "phenogen/generator/sampling.h"
#include "phenogen/generator/training.h"
#include "phenogen/hash.h"
#include "phenogen/io/checkpoint.h"
#include "phenogen/io/corpus.h"
#include "phenogen/io/manifest.h"
#include "phenogen/io/triplets.h"
#include "phenogen/metrics/metrics.h"
#include "phenogen/rl/trainer.h"

namespace phenogen::cli {

const char* const kToyOracleSpec =
    "base 0\n"
    "perturbation 0.1\n"
    "element C 1.5 6\n"
    "element N -1\n"
    "element O -1\n"
    "rings -2\n"
    "mw_window 40 100 2\n";

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kStageOrder = {"pretrain", "joint", "finetune", "sample", "evaluate"};
const std::vector<std::string> kProbes = {"CCO", "c1ccccc1O", "CC(=O)Nc1ccc(O)cc1"};

const chem::Vocabulary& vocab() { return chem::Vocabulary::default_vocabulary(); }

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

// Artifacts of one output directory and the manifest that ties them together.
class RunDir {
 public:
  RunDir(const RunConfig& cfg) : cfg_(cfg), root_(cfg.out_dir) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec || !fs::is_directory(root_)) throw Error(Errc::kIoFailure, "cannot create output directory " + root_.string());
    const fs::path m = root_ / "manifest.json";
    if (fs::exists(m)) manifest_ = io::Manifest::load(m);
    manifest_.tool_version = kToolVersion;
    manifest_.seed = cfg.seed;
    manifest_.config_hash = hex64(fnv1a(cfg.to_json()));
  }

  fs::path path(const std::string& name) const { return root_ / name; }

  fs::path require(const fs::path& p, const std::string& what) const {
    if (!fs::is_regular_file(p)) throw Error(Errc::kInvalidArgument, what + " not found: " + p.string());
    return p;
  }

  // Paths inside the run directory are recorded relative to it, others
  // absolute, so Manifest::verify(out_dir) resolves both.
  std::string record_name(const fs::path& p) const {
    const fs::path rel = fs::relative(fs::absolute(p), fs::absolute(root_));
    if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
    return fs::absolute(p).lexically_normal().generic_string();
  }

  void add_data_file(const fs::path& p) {
    const io::FileRecord rec{record_name(p), io::hash_file(p)};
    for (auto& f : manifest_.data_files) {
      if (f.path == rec.path) {
        f = rec;
        return;
      }
    }
    manifest_.data_files.push_back(rec);
  }

  /// Returns `hash` when an earlier stage produced it, else empty.
  std::string known_parent(const std::string& hash) const {
    for (const auto& l : manifest_.lineage) {
      if (l.hash == hash) return hash;
    }
    return {};
  }

  /// Drops the stage and every later one, then appends the new entry.
  void set_lineage(const std::string& stage, const fs::path& artifact, const std::string& parent) {
    const auto rank = [](const std::string& s) {
      return std::find(kStageOrder.begin(), kStageOrder.end(), s) - kStageOrder.begin();
    };
    auto& l = manifest_.lineage;
    l.erase(std::remove_if(l.begin(), l.end(), [&](const io::LineageEntry& e) { return rank(e.stage) >= rank(stage); }),
            l.end());
    l.push_back({stage, record_name(artifact), io::hash_file(artifact), parent});
  }

  void set_frozen_encoder(std::string before, std::string after) {
    manifest_.frozen_encoder = std::make_pair(std::move(before), std::move(after));
  }

  void finish(const std::string& stage, double seconds) {
    io::write_file_atomic(path("config.json"), cfg_.to_json());
    manifest_.save(path("manifest.json"));
    std::ofstream timing(path("timing.tsv"), std::ios::app);
    timing << stage << '\t' << std::setprecision(6) << seconds << '\n';
  }

 private:
  const RunConfig& cfg_;
  fs::path root_;
  io::Manifest manifest_;
};

std::vector<std::string> load_corpus_for(const RunConfig& cfg, RunDir& dir, std::ostream& err) {
  if (cfg.data.corpus.empty()) {
    const fs::path synth = dir.path("corpus.smi");
    io::write_smiles_file(synth, io::synth_corpus(cfg.data.synth_corpus_size, cfg.seed));
    dir.add_data_file(synth);
    return io::load_corpus(synth, vocab(), cfg.model.max_len).smiles;
  }
  const fs::path p = dir.require(cfg.data.corpus, "corpus");
  io::CorpusLoad load = io::load_corpus(p, vocab(), cfg.model.max_len);
  if (load.skipped > 0) err << "warning: " << load.skipped << " corpus lines skipped\n";
  for (const auto& w : load.warnings) err << "  " << w << '\n';
  dir.add_data_file(p);
  return std::move(load.smiles);
}

std::vector<gen::TripletRecord> load_triplets_for(const RunConfig& cfg, RunDir& dir) {
  const fs::path p = cfg.data.triplets.empty() ? dir.path("triplets.tsv") : fs::path(cfg.data.triplets);
  io::TripletFile tf = io::read_triplets(dir.require(p, "triplets"));
  if (tf.genes != cfg.model.genes) {
    throw Error(Errc::kGeneCountMismatch, p.string() + " has " + std::to_string(tf.genes) + " genes, model.genes is " +
                                              std::to_string(cfg.model.genes));
  }
  dir.add_data_file(p);
  return std::move(tf.records);
}

std::vector<gen::ExpressionProfile> profiles_for(const RunConfig& cfg, RunDir& dir) {
  const auto triplets = load_triplets_for(cfg, dir);
  std::vector<gen::ExpressionProfile> out;
  for (std::size_t i = 0; i < triplets.size() && static_cast<int>(out.size()) < cfg.data.profiles; ++i) {
    out.push_back(gen::profile_delta(triplets[i]));
  }
  if (out.empty()) throw Error(Errc::kEmptyInput, "no triplets to take conditioning profiles from");
  return out;
}

io::Checkpoint load_model(const fs::path& p, const RunDir& dir, const std::string& what) {
  return io::load_checkpoint(dir.require(p, what), &vocab());
}

std::string encoder_hash(const gen::ModelParams& params) {
  gen::ModelParams enc;
  enc.config = params.config;
  for (const auto& [name, t] : params.tensors) {
    if (gen::in_block(name, gen::kMolEncoder)) enc.tensors.emplace(name, t);
  }
  return hex64(io::params_hash(enc));
}

void print_epochs(const std::vector<gen::LossRecord>& log, std::ostream& out) {
  int epoch = 0;
  for (const auto& r : log) {
    if (r.epoch != epoch) {
      if (epoch) out << '\n';
      epoch = r.epoch;
      out << "epoch " << epoch;
    }
    out << ' ' << r.term << ' ' << fmt(r.value);
  }
  if (epoch) out << '\n';
}

io::Checkpoint make_checkpoint(const gen::ModelParams& params, const std::string& stage, const RunConfig& cfg,
                               const std::string& parent) {
  io::Checkpoint ck{params, vocab(), {{"stage", stage}, {"seed", std::to_string(cfg.seed)}}};
  if (!parent.empty()) ck.meta["parent"] = parent;
  return ck;
}

void cmd_pretrain(const RunConfig& cfg, RunDir& dir, std::ostream& out, std::ostream& err) {
  const auto corpus = load_corpus_for(cfg, dir, err);
  gen::TrainConfig tc = cfg.pretrain;
  tc.seed = stage_seed(cfg.seed, "pretrain");
  const gen::ModelParams init = gen::init_params(cfg.model, stage_seed(cfg.seed, "init"));
  const gen::TrainResult r = gen::pretrain_molvae(corpus, init, tc, vocab());
  print_epochs(r.log, out);
  const fs::path ck = dir.path("molvae.ckpt");
  io::save_checkpoint(ck, make_checkpoint(r.params, "pretrain", cfg, ""));
  io::write_file_atomic(dir.path("pretrain_loss.tsv"), gen::format_loss_log(r.log));
  dir.set_lineage("pretrain", ck, "");
  out << "pretrain: " << corpus.size() << " molecules, " << tc.epochs << " epochs -> " << ck.string() << '\n';
}

void cmd_joint(const RunConfig& cfg, RunDir& dir, std::ostream& out, std::ostream& err) {
  const fs::path parent_path = dir.path("molvae.ckpt");
  const io::Checkpoint molvae = load_model(parent_path, dir, "molecule VAE checkpoint");
  if (cfg.data.triplets.empty()) {
    const auto corpus = load_corpus_for(cfg, dir, err);
    io::SynthConfig sc;
    sc.genes = cfg.model.genes;
    sc.seed = cfg.seed;
    sc.noise = cfg.data.synth_noise;
    sc.cell_lines = cfg.data.cell_lines;
    io::write_triplets(dir.path("triplets.tsv"), io::synth_triplets(corpus, sc), sc.genes, sc.seed);
  }
  const auto triplets = load_triplets_for(cfg, dir);
  gen::TrainConfig tc = cfg.joint;
  tc.seed = stage_seed(cfg.seed, "joint");
  const std::string before = encoder_hash(molvae.params);
  const gen::TrainResult r = gen::joint_train(triplets, molvae.params, tc, vocab());
  const std::string after = encoder_hash(r.params);
  if (before != after) throw Error(Errc::kInvalidArgument, "molecule encoder changed during joint training");
  print_epochs(r.log, out);
  const std::string parent = io::hash_file(parent_path);
  const fs::path ck = dir.path("joint.ckpt");
  io::save_checkpoint(ck, make_checkpoint(r.params, "joint", cfg, parent));
  io::write_file_atomic(dir.path("joint_loss.tsv"), gen::format_loss_log(r.log));
  dir.set_frozen_encoder(before, after);
  dir.set_lineage("joint", ck, dir.known_parent(parent));
  out << "joint: " << triplets.size() << " triplets, " << tc.epochs << " epochs, encoder " << after
      << " unchanged -> " << ck.string() << '\n';
}

void cmd_finetune(const RunConfig& cfg, RunDir& dir, std::ostream& out, std::ostream&) {
  const fs::path prior_path = dir.path("joint.ckpt");
  const io::Checkpoint prior = load_model(prior_path, dir, "joint checkpoint");
  const std::string prior_hash = io::hash_file(prior_path);
  const auto profiles = profiles_for(cfg, dir);
  auto oracle = make_oracle(cfg);
  rl::TrainerConfig tc = cfg.finetune;
  tc.seed = stage_seed(cfg.seed, "finetune");
  tc.max_len = cfg.model.max_len;
  const rl::FinetuneResult r =
      rl::finetune(prior.params, *oracle, profiles, tc, cfg.reward, vocab(), [&](const rl::StepRecord& s) {
        out << "step " << s.step << " loss " << fmt(s.loss.total) << " reward " << fmt(s.mean_reward) << " valid "
            << fmt(s.validity_rate, 3) << " entropy " << fmt(s.mean_entropy, 3) << " unique "
            << fmt(s.unique_in_batch, 3) << " gap " << fmt(s.mean_logp_gap, 3) << '\n';
      });
  if (io::hash_file(prior_path) != prior_hash) throw Error(Errc::kIoFailure, "prior checkpoint changed during fine-tuning");
  const fs::path ck = dir.path("agent.ckpt");
  io::save_checkpoint(ck, make_checkpoint(r.agent, "finetune", cfg, prior_hash));
  io::write_file_atomic(dir.path("run_log.tsv"), rl::format_run_log(r.log));
  dir.set_lineage("finetune", ck, dir.known_parent(prior_hash));

  const auto window = [&](bool head, auto field) {
    const std::size_t k = std::min<std::size_t>(10, r.log.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += field(r.log[head ? i : r.log.size() - 1 - i]);
    return k ? sum / static_cast<double>(k) : 0.0;
  };
  const auto reward = [](const rl::StepRecord& s) { return s.mean_reward; };
  const auto valid = [](const rl::StepRecord& s) { return s.validity_rate; };
  out << "finetune summary\n"
      << "  steps            " << r.log.size() << '\n'
      << "  reward first 10  " << fmt(window(true, reward)) << '\n'
      << "  reward last 10   " << fmt(window(false, reward)) << '\n'
      << "  validity first10 " << fmt(window(true, valid), 3) << '\n'
      << "  validity last 10 " << fmt(window(false, valid), 3) << '\n'
      << "  oracle molecules " << oracle->molecules_scored() << '\n'
      << "  prior " << prior_hash << " unchanged\n"
      << "  agent -> " << ck.string() << '\n';
}

bool chem_valid(const std::string& smiles, std::string& key) {
  try {
    const chem::MolGraph g = chem::parse_smiles(smiles);
    if (!chem::check_valence(g).valid) return false;
    key = chem::canonical_key(g);
    return true;
  } catch (const Error&) {
    return false;
  }
}

void cmd_sample(const RunConfig& cfg, RunDir& dir, std::ostream& out, std::ostream& err) {
  const fs::path ck_path = cfg.sample.checkpoint.empty() ? dir.path("agent.ckpt") : fs::path(cfg.sample.checkpoint);
  const io::Checkpoint ck = load_model(ck_path, dir, "checkpoint");
  const int n = cfg.sample.n;
  std::vector<std::string> accepted;
  long decoded = 0;
  if (n > 0) {
    const auto profiles = profiles_for(cfg, dir);
    const int genes = ck.params.config.genes;
    const long cap = static_cast<long>(cfg.sample.retry_factor) * n;
    const gen::DecodeMode mode = cfg.sample.mode == "greedy" ? gen::DecodeMode::kGreedy : gen::DecodeMode::kSample;
    const std::uint64_t latent_label = fnv1a(std::string_view("sample.latent"));
    const std::uint64_t decode_label = fnv1a(std::string_view("sample.decode"));
    std::set<std::string> keys;
    while (static_cast<int>(accepted.size()) < n && decoded < cap) {
      const int rows = static_cast<int>(std::min<long>(64, cap - decoded));
      nn::Tensor x(rows, genes);
      std::vector<std::uint64_t> latent_seeds(rows), decode_seeds(rows);
      for (int b = 0; b < rows; ++b) {
        const long i = decoded + b;
        const auto& p = profiles[static_cast<std::size_t>(i) % profiles.size()];
        if (static_cast<int>(p.size()) != genes) throw Error(Errc::kGeneCountMismatch, "profile length differs from model genes");
        for (int g = 0; g < genes; ++g) x(b, g) = p[g];
        latent_seeds[b] = derive_seed(cfg.seed, latent_label, static_cast<std::uint64_t>(i));
        decode_seeds[b] = derive_seed(cfg.seed, decode_label, static_cast<std::uint64_t>(i));
      }
      const auto [mu, logvar] = gen::encode_expression(ck.params, x);
      const nn::Tensor z = gen::sample_latents(mu, logvar, latent_seeds);
      const auto seqs = gen::decode_batch(ck.params, z, mode, decode_seeds, vocab(), cfg.model.max_len);
      for (const auto& s : seqs) {
        ++decoded;
        if (s.truncated) continue;
        const std::string smiles = chem::detokenize(s, vocab());
        std::string key;
        if (chem_valid(smiles, key) && keys.insert(key).second) {
          accepted.push_back(smiles);
          if (static_cast<int>(accepted.size()) == n) break;
        }
      }
    }
    if (static_cast<int>(accepted.size()) < n) {
      err << "warning: " << errc_name(Errc::kRetryCapExceeded) << ": " << accepted.size() << " of " << n
          << " unique valid molecules after " << decoded << " decodes; writing partial output\n";
    }
  }
  const fs::path smi = dir.path("samples.smi");
  io::write_smiles_file(smi, accepted);
  dir.set_lineage("sample", smi, dir.known_parent(io::hash_file(ck_path)));
  out << "sample: " << accepted.size() << " unique valid molecules from " << decoded << " decodes -> " << smi.string()
      << '\n';
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::istringstream in(io::read_file(p));
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) lines.push_back(line);
  }
  return lines;
}

struct EvaluateArgs {
  std::string input;
  bool score = false;
};

void cmd_evaluate(const RunConfig& cfg, const EvaluateArgs& args, RunDir& dir, std::ostream& out) {
  const fs::path input = dir.require(args.input.empty() ? dir.path("samples.smi") : fs::path(args.input), "input");
  const std::vector<std::string> generated = read_lines(input);
  std::optional<std::set<std::string>> reference;
  if (!cfg.data.reference.empty()) {
    const fs::path ref = dir.require(cfg.data.reference, "reference");
    reference = metrics::reference_keys(read_lines(ref));
    dir.add_data_file(ref);
  }
  std::vector<reward::RewardRecord> rewards;
  if (args.score) {
    auto oracle = make_oracle(cfg);
    reward::RewardMemo memo(*oracle, cfg.reward);
    rewards = memo.evaluate(generated);
  }
  const metrics::EvalReport report = metrics::evaluate(generated, reference, args.score ? &rewards : nullptr);
  const fs::path json = dir.path("report.json");
  metrics::emit_report(report, json, dir.path("report.txt"));
  const std::string input_hash = io::hash_file(input);
  if (dir.known_parent(input_hash).empty()) dir.add_data_file(input);
  dir.set_lineage("evaluate", json, dir.known_parent(input_hash));
  out << metrics::report_table(report);
}

int cmd_oracle_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto oracle = make_oracle(cfg);
  out << "oracle: " << cfg.oracle.kind;
  if (cfg.oracle.kind == "mock") out << " (spec: " << (cfg.oracle.spec.empty() ? "built-in toy" : cfg.oracle.spec) << ")";
  else out << " (command: " << cfg.oracle.command << ")";
  out << '\n';
  const auto t0 = std::chrono::steady_clock::now();
  const auto results = oracle->score_batch(kProbes);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  int failures = 0;
  std::optional<Errc> first_failure;
  for (std::size_t i = 0; i < kProbes.size(); ++i) {
    const auto& r = results[i];
    out << "probe " << i << "  " << std::left << std::setw(20) << kProbes[i] << std::right;
    if (r.score) {
      out << "  raw " << fmt(*r.score, 6) << "  normalized " << fmt(reward::normalize_dock(*r.score, true, cfg.reward.k), 6)
          << '\n';
    } else {
      ++failures;
      if (!first_failure) first_failure = r.failure;
      out << "  FAILED " << errc_name(r.failure.value_or(Errc::kParseFailure)) << ": " << r.message << '\n';
    }
  }
  out << "round trip: " << fmt(seconds, 3) << " s for " << kProbes.size() << " molecules\n";
  if (failures == 0) return 0;
  if (first_failure == Errc::kTimeout) {
    const auto* ext = dynamic_cast<const reward::ExternalOracle*>(oracle.get());
    const double budget = ext ? ext->per_molecule_timeout().count() * static_cast<double>(kProbes.size()) : 0.0;
    err << "oracle timed out: the command did not finish within " << fmt(budget, 3) << " s ("
        << kProbes.size() << " molecules at " << fmt(budget / static_cast<double>(kProbes.size()), 3)
        << " s each); raise oracle.timeout_s or " << reward::kOracleTimeoutEnv << '\n';
  } else {
    err << "oracle check failed for " << failures << " of " << kProbes.size() << " probes\n";
  }
  return 3;
}

}  // namespace

std::uint64_t stage_seed(std::uint64_t seed, std::string_view label) { return derive_seed(seed, fnv1a(label)); }

std::unique_ptr<reward::DockingOracle> make_oracle(const RunConfig& cfg) {
  if (cfg.oracle.kind == "mock") {
    const auto spec = cfg.oracle.spec.empty() ? reward::PharmacophoreSpec::parse(kToyOracleSpec)
                                              : reward::PharmacophoreSpec::load(cfg.oracle.spec);
    return std::make_unique<reward::MockOracle>(cfg.oracle.seed, spec);
  }
  const fs::path workdir = cfg.oracle.workdir.empty() ? fs::path(cfg.out_dir) / "oracle" : fs::path(cfg.oracle.workdir);
  std::error_code ec;
  fs::create_directories(workdir, ec);
  if (!fs::is_directory(workdir)) throw Error(Errc::kIoFailure, "cannot create oracle workdir " + workdir.string());
  return std::make_unique<reward::ExternalOracle>(cfg.oracle.command, workdir,
                                                  std::chrono::duration<double>(cfg.oracle.timeout_s));
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phenotype-conditioned molecule generation with RL fine-tuning", "phenogen"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Run seed (overrides the config)");
  app.add_option("--out-dir", out_dir, "Output directory (overrides the config)");

  std::optional<int> pretrain_epochs, joint_epochs, steps, batch, n;
  std::optional<std::string> checkpoint, mode, reference;
  EvaluateArgs eval;

  auto* pretrain = app.add_subcommand("pretrain", "Train the molecule VAE on the corpus");
  pretrain->add_option("--epochs,--steps", pretrain_epochs, "Training epochs");
  auto* joint = app.add_subcommand("joint", "Train the expression VAE against the frozen molecule encoder");
  joint->add_option("--epochs,--steps", joint_epochs, "Training epochs");
  auto* finetune = app.add_subcommand("finetune", "Fine-tune the agent with the oracle reward");
  finetune->add_option("--steps", steps, "RL steps");
  finetune->add_option("--batch-size", batch, "Molecules per step");
  auto* sample = app.add_subcommand("sample", "Write unique valid molecules from a checkpoint");
  sample->add_option("-n,--n", n, "Number of unique molecules");
  sample->add_option("--checkpoint", checkpoint, "Checkpoint (default: agent.ckpt in the output directory)");
  sample->add_option("--mode", mode, "sample or greedy");
  auto* evaluate = app.add_subcommand("evaluate", "Compute metrics for a SMILES file");
  evaluate->add_option("--input", eval.input, "SMILES file (default: samples.smi in the output directory)");
  evaluate->add_option("--reference", reference, "Reference corpus for novelty");
  evaluate->add_flag("--score", eval.score, "Score molecules with the configured oracle");
  auto* oracle_check = app.add_subcommand("oracle-check", "Score three probe molecules with the configured oracle");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  std::string stage;
  try {
    RunConfig cfg = config_path.empty() ? RunConfig() : RunConfig::load(config_path);
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.out_dir = *out_dir;
    if (pretrain_epochs) cfg.pretrain.epochs = *pretrain_epochs;
    if (joint_epochs) cfg.joint.epochs = *joint_epochs;
    if (steps) cfg.finetune.steps = *steps;
    if (batch) cfg.finetune.batch_size = *batch;
    if (n) cfg.sample.n = *n;
    if (checkpoint) cfg.sample.checkpoint = *checkpoint;
    if (mode) cfg.sample.mode = *mode;
    if (reference) cfg.data.reference = *reference;
    cfg.validate();

    if (oracle_check->parsed()) return cmd_oracle_check(cfg, out, err);

    RunDir dir(cfg);
    if (pretrain->parsed()) stage = "pretrain", cmd_pretrain(cfg, dir, out, err);
    else if (joint->parsed()) stage = "joint", cmd_joint(cfg, dir, out, err);
    else if (finetune->parsed()) stage = "finetune", cmd_finetune(cfg, dir, out, err);
    else if (sample->parsed()) stage = "sample", cmd_sample(cfg, dir, out, err);
    else if (evaluate->parsed()) stage = "evaluate", cmd_evaluate(cfg, eval, dir, out);
    dir.finish(stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace phenogen::cli
