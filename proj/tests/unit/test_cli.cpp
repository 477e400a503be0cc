#include <chrono>
#include <set>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "phenogen/chem/canonical.h"
#include "phenogen/chem/smiles_parser.h"
#include "phenogen/cli/commands.h"
#include "phenogen/cli/config.h"
#include "phenogen/error.h"
#include "phenogen/io/checkpoint.h"
#include "phenogen/io/corpus.h"
#include "phenogen/io/manifest.h"
#include "test_support.h"

namespace phenogen {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::data_path;
using testing::read_lines;
using testing::scratch_dir;
using testing::write_text;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Small enough that the whole pipeline runs in about a second.
json tiny_config(const fs::path& out_dir) {
  return {
      {"out_dir", out_dir.string()},
      {"model",
       {{"hidden", 16}, {"layers", 1}, {"latent", 8}, {"embed_dim", 8}, {"genes", 16}, {"exp_hidden", {16}},
        {"dropout", 0.0}}},
      {"data", {{"synth_corpus_size", 40}}},
      {"pretrain", {{"epochs", 2}, {"lr", 5e-3}}},
      {"joint", {{"epochs", 1}, {"lr", 5e-3}}},
      {"finetune", {{"steps", 5}, {"batch_size", 8}}},
      {"sample", {{"n", 10}}},
  };
}

fs::path write_config(const fs::path& dir, const json& j, const std::string& name = "config.in.json") {
  const fs::path p = dir / name;
  write_text(p, j.dump());
  return p;
}

std::string slurp(const fs::path& p) { return io::read_file(p); }

// --- config -----------------------------------------------------------------

TEST(RunConfig, DefaultsMatchTheDocumentedValues) {
  const cli::RunConfig c;
  EXPECT_DOUBLE_EQ(c.pretrain.lr, 5e-4);
  EXPECT_DOUBLE_EQ(c.finetune.lr, 1e-4);
  EXPECT_EQ(c.pretrain.batch_size, 64);
  EXPECT_EQ(c.joint.batch_size, 64);
  EXPECT_EQ(c.finetune.batch_size, 64);
  EXPECT_EQ(c.model.max_len, 100);
  EXPECT_EQ(c.model.vocab_size, chem::Vocabulary::default_vocabulary().size());
  EXPECT_EQ(c.sample.retry_factor, 50);
  EXPECT_NO_THROW(c.validate());
}

TEST(RunConfig, RoundTripsThroughJson) {
  cli::RunConfig c;
  c.seed = 42;
  c.finetune.weights.lambda = 0.0;
  c.reward.as_mode = reward::AsMode::kDockOnly;
  c.model.exp_hidden = {8, 4};
  const cli::RunConfig back = cli::RunConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.reward.as_mode, reward::AsMode::kDockOnly);
}

void expect_config_error(const std::string& text) {
  try {
    cli::RunConfig::from_json(text);
    ADD_FAILURE() << "accepted: " << text;
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kConfig) << text;
  }
}

TEST(RunConfig, RejectsUnknownKeysAtEveryLevel) {
  expect_config_error(R"({"sed": 1})");
  expect_config_error(R"({"model": {"hiden": 8}})");
  expect_config_error(R"({"finetune": {"alpha": 0.1, "delta": 1}})");
}

TEST(RunConfig, RejectsMistypedValues) {
  expect_config_error(R"({"seed": "1"})");
  expect_config_error(R"({"seed": -1})");
  expect_config_error(R"({"model": {"hidden": 8.5}})");
  expect_config_error(R"({"model": {"exp_hidden": [8, "x"]}})");
  expect_config_error(R"({"finetune": {"baseline": 1}})");
  expect_config_error(R"({"reward": {"as_mode": "median"}})");
  expect_config_error(R"({"model": []})");
  expect_config_error(R"([1, 2])");
  expect_config_error("{not json");
}

TEST(RunConfig, RejectsOutOfRangeValues) {
  expect_config_error(R"({"reward": {"k": 1.0}})");
  expect_config_error(R"({"finetune": {"batch_size": 1}})");
  expect_config_error(R"({"pretrain": {"lr": 0}})");
  expect_config_error(R"({"oracle": {"kind": "external"}})");
  expect_config_error(R"({"sample": {"mode": "beam"}})");
  expect_config_error(R"({"model": {"dropout": 1.0}})");
}

TEST(RunConfig, VocabularySizeIsNotConfigurable) { expect_config_error(R"({"model": {"vocab_size": 41}})"); }

// --- exit codes and global flags ---------------------------------------------

TEST(ExitCodes, MapErrorFamilies) {
  EXPECT_EQ(exit_code_for(Errc::kOracleUnavailable), 3);
  EXPECT_EQ(exit_code_for(Errc::kSpawnFailure), 3);
  EXPECT_EQ(exit_code_for(Errc::kTimeout), 3);
  EXPECT_EQ(exit_code_for(Errc::kDivergedLoss), 4);
  EXPECT_EQ(exit_code_for(Errc::kNonFinite), 4);
  EXPECT_EQ(exit_code_for(Errc::kConfig), 2);
  EXPECT_EQ(exit_code_for(Errc::kIoFailure), 2);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"train"}).code, 2);
  EXPECT_EQ(run({"pretrain", "--bogus"}).code, 2);
  EXPECT_EQ(run({"--config", "/nonexistent/config.json", "pretrain"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, UnknownConfigKeyAbortsBeforeAnyWork) {
  const fs::path dir = scratch_dir("cli_unknown_key");
  json j = tiny_config(dir / "run");
  j["pretrain"]["epochz"] = 3;
  const CliRun r = run({"--config", write_config(dir, j).string(), "pretrain"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("epochz"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "run"));
}

TEST(Cli, FlagsOverrideTheConfigFile) {
  const fs::path dir = scratch_dir("cli_flags");
  const fs::path cfg = write_config(dir, tiny_config(dir / "from_config"));
  const CliRun r = run({"--config", cfg.string(), "--seed", "9", "--out-dir", (dir / "from_flag").string(), "pretrain",
                     "--epochs", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(fs::exists(dir / "from_config"));
  const auto m = io::Manifest::load(dir / "from_flag" / "manifest.json");
  EXPECT_EQ(m.seed, 9u);
  const auto resolved = cli::RunConfig::load((dir / "from_flag" / "config.json").string());
  EXPECT_EQ(resolved.pretrain.epochs, 0);
  EXPECT_EQ(resolved.seed, 9u);
}

TEST(Cli, NumericDivergenceExitsFour) {
  const fs::path dir = scratch_dir("cli_diverge");
  json j = tiny_config(dir / "run");
  j["pretrain"]["lr"] = 1e300;
  const CliRun r = run({"--config", write_config(dir, j).string(), "pretrain"});
  EXPECT_EQ(r.code, 4) << r.err;
  EXPECT_NE(r.err.find("DivergedLoss"), std::string::npos);
}

// --- pretrain ----------------------------------------------------------------

TEST(CmdPretrain, MissingCorpusNamesThePath) {
  const fs::path dir = scratch_dir("cli_missing_corpus");
  json j = tiny_config(dir / "run");
  j["data"]["corpus"] = (dir / "absent.smi").string();
  const CliRun r = run({"--config", write_config(dir, j).string(), "pretrain"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find((dir / "absent.smi").string()), std::string::npos) << r.err;
}

TEST(CmdPretrain, ZeroStepsWritesTheInitialParameters) {
  const fs::path dir = scratch_dir("cli_zero_steps");
  const json j = tiny_config(dir / "run");
  const CliRun r = run({"--config", write_config(dir, j).string(), "pretrain", "--steps", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const io::Checkpoint ck = io::load_checkpoint(dir / "run" / "molvae.ckpt");
  const cli::RunConfig cfg = cli::RunConfig::from_json(j.dump());
  const gen::ModelParams init = gen::init_params(cfg.model, cli::stage_seed(cfg.seed, "init"));
  EXPECT_EQ(io::params_hash(ck.params), io::params_hash(init));
  EXPECT_EQ(ck.params.tensors, init.tensors);
}

TEST(CmdPretrain, ImportedCorpusIsFilteredAndRecorded) {
  const fs::path dir = scratch_dir("cli_imported_corpus");
  write_text(dir / "corpus.smi", "CCO\nC(C)(C)(C)(C)C\nc1ccccc1\r\nCCN\n");
  json j = tiny_config(dir / "run");
  j["data"]["corpus"] = (dir / "corpus.smi").string();
  j["pretrain"]["epochs"] = 1;
  const CliRun r = run({"--config", write_config(dir, j).string(), "pretrain"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("1 corpus lines skipped"), std::string::npos);
  EXPECT_NE(r.out.find("3 molecules"), std::string::npos);
  const auto m = io::Manifest::load(dir / "run" / "manifest.json");
  ASSERT_EQ(m.data_files.size(), 1u);
  EXPECT_EQ(m.data_files[0].path, fs::absolute(dir / "corpus.smi").lexically_normal().generic_string());
  EXPECT_TRUE(m.verify(dir / "run").empty());
}

TEST(CmdPretrain, RerunWithSameSeedReproducesTheCheckpoint) {
  const fs::path dir = scratch_dir("cli_pretrain_rerun");
  const fs::path cfg = write_config(dir, tiny_config(dir / "run"));
  ASSERT_EQ(run({"--config", cfg.string(), "pretrain"}).code, 0);
  const std::string first = slurp(dir / "run" / "molvae.ckpt");
  const auto m1 = io::Manifest::load(dir / "run" / "manifest.json");
  ASSERT_EQ(run({"--config", cfg.string(), "pretrain"}).code, 0);
  const auto m2 = io::Manifest::load(dir / "run" / "manifest.json");
  EXPECT_EQ(slurp(dir / "run" / "molvae.ckpt"), first);
  ASSERT_EQ(m1.lineage.size(), 1u);
  EXPECT_EQ(m1.lineage, m2.lineage);
  ASSERT_EQ(run({"--config", cfg.string(), "--seed", "2", "pretrain"}).code, 0);
  EXPECT_NE(io::Manifest::load(dir / "run" / "manifest.json").lineage[0].hash, m1.lineage[0].hash);
}

// --- the full pipeline ---------------------------------------------------------

class Pipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = scratch_dir("cli_pipeline");
    config_ = write_config(dir_, tiny_config(dir_ / "run")).string();
    for (const char* stage : {"pretrain", "joint", "finetune"}) {
      const CliRun r = run({"--config", config_, stage});
      ASSERT_EQ(r.code, 0) << stage << ": " << r.err;
      outputs_[stage] = r.out;
    }
  }

  static fs::path run_dir() { return dir_ / "run"; }

  // Config for a separate output directory reusing this pipeline's triplets.
  static std::string sibling_config(const std::string& name, const std::function<void(json&)>& edit = nullptr) {
    json j = tiny_config(dir_ / name);
    j["data"]["triplets"] = (run_dir() / "triplets.tsv").string();
    j["sample"]["checkpoint"] = (run_dir() / "agent.ckpt").string();
    if (edit) edit(j);
    return write_config(dir_, j, name + ".json").string();
  }

  static inline fs::path dir_;
  static inline std::string config_;
  static inline std::map<std::string, std::string> outputs_;
};

TEST_F(Pipeline, JointKeepsTheEncoderFrozenAndRecordsLineage) {
  const auto m = io::Manifest::load(run_dir() / "manifest.json");
  ASSERT_TRUE(m.frozen_encoder.has_value());
  EXPECT_EQ(m.frozen_encoder->first, m.frozen_encoder->second);
  ASSERT_GE(m.lineage.size(), 2u);
  EXPECT_EQ(m.lineage[0].stage, "pretrain");
  EXPECT_EQ(m.lineage[1].stage, "joint");
  EXPECT_EQ(m.lineage[1].parent, m.lineage[0].hash);
  EXPECT_EQ(m.lineage[0].hash, io::hash_file(run_dir() / "molvae.ckpt"));
}

TEST_F(Pipeline, JointWithoutMolvaeCheckpointExitsTwo) {
  const fs::path empty = scratch_dir("cli_joint_missing");
  const CliRun r = run({"--out-dir", empty.string(), "joint"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("molvae.ckpt"), std::string::npos);
}

TEST_F(Pipeline, FinetuneLogsOneLinePerStepAndLeavesThePriorAlone) {
  const auto m = io::Manifest::load(run_dir() / "manifest.json");
  ASSERT_GE(m.lineage.size(), 3u);
  EXPECT_EQ(m.lineage[2].stage, "finetune");
  EXPECT_EQ(m.lineage[2].parent, m.lineage[1].hash);
  EXPECT_EQ(io::hash_file(run_dir() / "joint.ckpt"), m.lineage[1].hash);
  const auto log = read_lines(run_dir() / "run_log.tsv");
  ASSERT_EQ(log.size(), 1u + 5u);  // header + steps
  EXPECT_EQ(log[0].rfind("step\t", 0), 0u);
  int step_lines = 0;
  std::istringstream out(outputs_["finetune"]);
  for (std::string line; std::getline(out, line);) step_lines += line.rfind("step ", 0) == 0;
  EXPECT_EQ(step_lines, 5);
  EXPECT_NE(outputs_["finetune"].find("finetune summary"), std::string::npos);
  EXPECT_TRUE(m.verify(run_dir()).empty());
}

TEST_F(Pipeline, MockSmokeRunFitsTheBudget) {
  const std::string cfg = sibling_config("smoke");
  fs::create_directories(dir_ / "smoke");
  fs::copy_file(run_dir() / "joint.ckpt", dir_ / "smoke" / "joint.ckpt");
  const auto t0 = std::chrono::steady_clock::now();
  const CliRun r = run({"--config", cfg, "finetune", "--steps", "5", "--batch-size", "8"});
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(seconds, 60.0);
}

TEST_F(Pipeline, FinetuneWithoutJointCheckpointExitsTwo) {
  const CliRun r = run({"--config", sibling_config("no_prior"), "finetune"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("joint.ckpt"), std::string::npos);
}

TEST_F(Pipeline, SampleWritesDistinctValidMolecules) {
  const CliRun r = run({"--config", sibling_config("sample10"), "sample", "-n", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = read_lines(dir_ / "sample10" / "samples.smi");
  ASSERT_EQ(lines.size(), 10u);
  std::set<std::string> keys;
  for (const auto& s : lines) keys.insert(chem::canonical_key(chem::parse_smiles(s)));
  EXPECT_EQ(keys.size(), 10u);
}

TEST_F(Pipeline, SampleIsDeterministic) {
  const std::string cfg = sibling_config("sample_det");
  ASSERT_EQ(run({"--config", cfg, "sample"}).code, 0);
  const std::string first = slurp(dir_ / "sample_det" / "samples.smi");
  ASSERT_EQ(run({"--config", cfg, "sample"}).code, 0);
  EXPECT_EQ(slurp(dir_ / "sample_det" / "samples.smi"), first);
  EXPECT_FALSE(first.empty());
}

TEST_F(Pipeline, SampleZeroWritesAnEmptyFile) {
  const CliRun r = run({"--config", sibling_config("sample0"), "sample", "--n", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir_ / "sample0" / "samples.smi"), "");
}

TEST_F(Pipeline, SampleRetryCapWarnsAndWritesPartialOutput) {
  const std::string cfg = sibling_config("sample_cap", [](json& j) { j["sample"]["retry_factor"] = 1; });
  const CliRun r = run({"--config", cfg, "sample", "-n", "200"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("RetryCapExceeded"), std::string::npos);
  const auto lines = read_lines(dir_ / "sample_cap" / "samples.smi");
  EXPECT_LT(lines.size(), 200u);
  EXPECT_NE(r.out.find("from 200 decodes"), std::string::npos) << r.out;
}

TEST_F(Pipeline, SampleWithMissingCheckpointExitsTwo) {
  const CliRun r = run({"--config", sibling_config("sample_missing"), "sample", "--checkpoint",
                     (dir_ / "nope.ckpt").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("nope.ckpt"), std::string::npos);
}

TEST_F(Pipeline, EveryPrimaryArtifactIsByteIdenticalOnRerun) {
  const fs::path a = dir_ / "rerun_a", b = dir_ / "rerun_b";
  for (const fs::path& d : {a, b}) {
    json j = tiny_config(d);
    const std::string cfg = write_config(d.parent_path(), j, d.filename().string() + ".json").string();
    for (const char* stage : {"pretrain", "joint", "finetune", "sample", "evaluate"}) {
      ASSERT_EQ(run({"--config", cfg, stage}).code, 0) << stage;
    }
  }
  for (const char* f : {"molvae.ckpt", "joint.ckpt", "agent.ckpt", "samples.smi", "report.json", "report.txt",
                        "run_log.tsv", "pretrain_loss.tsv", "joint_loss.tsv", "triplets.tsv", "corpus.smi"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  const auto ma = io::Manifest::load(a / "manifest.json"), mb = io::Manifest::load(b / "manifest.json");
  EXPECT_EQ(ma.lineage, mb.lineage);
  EXPECT_EQ(ma.data_files, mb.data_files);
  EXPECT_EQ(ma.lineage.size(), 5u);
}

TEST_F(Pipeline, RerunningAStageReplacesLaterLineage) {
  const fs::path d = dir_ / "relineage";
  const std::string cfg = write_config(dir_, tiny_config(d), "relineage.json").string();
  for (const char* stage : {"pretrain", "joint", "finetune", "sample"}) ASSERT_EQ(run({"--config", cfg, stage}).code, 0);
  ASSERT_EQ(io::Manifest::load(d / "manifest.json").lineage.size(), 4u);
  ASSERT_EQ(run({"--config", cfg, "joint"}).code, 0);
  const auto m = io::Manifest::load(d / "manifest.json");
  ASSERT_EQ(m.lineage.size(), 2u);
  EXPECT_EQ(m.lineage[1].stage, "joint");
}

// --- evaluate ----------------------------------------------------------------

TEST(CmdEvaluate, CraftedFileMatchesHandComputedRates) {
  const fs::path dir = scratch_dir("cli_eval_crafted");
  write_text(dir / "gen.smi", "CCO\nOCC\nCCN\nC1CC\n");
  write_text(dir / "ref.smi", "CCO\n");
  const CliRun r = run({"--out-dir", (dir / "run").string(), "evaluate", "--input", (dir / "gen.smi").string(),
                     "--reference", (dir / "ref.smi").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(slurp(dir / "run" / "report.json"));
  EXPECT_EQ(j.at("schema_version"), 1);
  EXPECT_EQ(j.at("n_generated"), 4);
  EXPECT_DOUBLE_EQ(j.at("validity_rate").get<double>(), 0.75);
  EXPECT_DOUBLE_EQ(j.at("uniqueness_rate").get<double>(), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(j.at("novelty_rate").get<double>(), 0.5);
  EXPECT_TRUE(j.at("has_reference").get<bool>());
  EXPECT_TRUE(fs::exists(dir / "run" / "report.txt"));
}

TEST(CmdEvaluate, MissingReferenceReportsFullNoveltyWithFlag) {
  const fs::path dir = scratch_dir("cli_eval_noref");
  write_text(dir / "gen.smi", "CCO\nCCN\n");
  const CliRun r = run({"--out-dir", (dir / "run").string(), "evaluate", "--input", (dir / "gen.smi").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(slurp(dir / "run" / "report.json"));
  EXPECT_DOUBLE_EQ(j.at("novelty_rate").get<double>(), 1.0);
  EXPECT_FALSE(j.at("has_reference").get<bool>());
  EXPECT_NE(r.out.find("no reference"), std::string::npos);
}

TEST(CmdEvaluate, ScoreFlagCarriesOracleValues) {
  const fs::path dir = scratch_dir("cli_eval_score");
  write_text(dir / "gen.smi", "CCCCCC\nCCO\n");
  const CliRun r = run({"--out-dir", (dir / "run").string(), "evaluate", "--score", "--input", (dir / "gen.smi").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(slurp(dir / "run" / "report.json"));
  EXPECT_FALSE(j.at("dock").is_null());
  EXPECT_FALSE(j.at("reward").is_null());
}

TEST(CmdEvaluate, MissingInputExitsTwo) {
  const fs::path dir = scratch_dir("cli_eval_missing");
  const CliRun r = run({"--out-dir", dir.string(), "evaluate", "--input", (dir / "none.smi").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("none.smi"), std::string::npos);
}

// --- oracle-check --------------------------------------------------------------

std::string probe_lines(const std::string& out) {
  std::istringstream in(out);
  std::string kept;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("probe ", 0) == 0) kept += line + "\n";
  }
  return kept;
}

TEST(CmdOracleCheck, MockProbesAreDeterministic) {
  const fs::path dir = scratch_dir("cli_oracle_mock");
  const CliRun a = run({"--out-dir", dir.string(), "oracle-check"});
  const CliRun b = run({"--out-dir", dir.string(), "oracle-check"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(probe_lines(a.out), probe_lines(b.out));
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n') >= 5, true);
  EXPECT_NE(a.out.find("normalized"), std::string::npos);
  EXPECT_NE(a.out.find("round trip"), std::string::npos);
}

TEST(CmdOracleCheck, StubScoresRoundTrip) {
  const fs::path dir = scratch_dir("cli_oracle_stub");
  const json j = {{"out_dir", dir.string()},
                  {"oracle",
                   {{"kind", "external"},
                    {"command", "sh " + data_path("oracle_stubs/constant.sh").string() + " {in} {out}"},
                    {"timeout_s", 5.0}}}};
  const CliRun r = run({"--config", write_config(dir, j).string(), "oracle-check"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string probes = probe_lines(r.out);
  EXPECT_EQ(std::count(probes.begin(), probes.end(), '\n'), 3);
  std::size_t at = 0;
  int hits = 0;
  while ((at = probes.find("raw -7.500000  normalized 0.750000", at)) != std::string::npos) ++hits, ++at;
  EXPECT_EQ(hits, 3);
}

TEST(CmdOracleCheck, HangingStubIsDiagnosedWithinBudget) {
  const fs::path dir = scratch_dir("cli_oracle_hang");
  const json j = {{"out_dir", dir.string()},
                  {"oracle",
                   {{"kind", "external"},
                    {"command", "sh " + data_path("oracle_stubs/hang.sh").string() + " {in} {out}"},
                    {"timeout_s", 0.2}}}};
  const auto t0 = std::chrono::steady_clock::now();
  const CliRun r = run({"--config", write_config(dir, j).string(), "oracle-check"});
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("timed out"), std::string::npos) << r.err;
  EXPECT_LT(seconds, 0.6 + 2.0);
}

TEST(CmdOracleCheck, FailingStubExitsThree) {
  const fs::path dir = scratch_dir("cli_oracle_fail");
  const json j = {{"out_dir", dir.string()},
                  {"oracle",
                   {{"kind", "external"}, {"command", "sh " + data_path("oracle_stubs/fail.sh").string() + " {in} {out}"}}}};
  const CliRun r = run({"--config", write_config(dir, j).string(), "oracle-check"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("FAILED"), std::string::npos);
}

}  // namespace
}  // namespace phenogen
