#include "phenogen/cli/config.h"

#include <set>

#include <json.hpp>

#include "phenogen/chem/vocabulary.h"
#include "phenogen/error.h"
#include "phenogen/io/corpus.h"

namespace phenogen::cli {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw Error(Errc::kConfig, where + ": " + what);
}

// Reads the keys of one JSON object, rejecting wrong types, and reports
// every key that nobody asked for.
class Section {
 public:
  Section(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) bad(where_, "expected an object");
  }

  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) bad(where_, "unknown key '" + key + "'");
    }
  }

  void get(const char* key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) bad(path(key), "expected an integer");
      const auto x = v->get<long long>();
      if (x < INT32_MIN || x > INT32_MAX) bad(path(key), "out of range");
      out = static_cast<int>(x);
    }
  }
  void get(const char* key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) bad(path(key), "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void get(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) bad(path(key), "expected a number");
      out = v->get<double>();
    }
  }
  void get(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) bad(path(key), "expected true or false");
      out = v->get<bool>();
    }
  }
  void get(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) bad(path(key), "expected a string");
      out = v->get<std::string>();
    }
  }
  void get(const char* key, std::vector<int>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) bad(path(key), "expected an array of integers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number_integer()) bad(path(key), "expected an array of integers");
        out.push_back(e.get<int>());
      }
    }
  }
  template <typename F>
  void section(const char* key, F&& read) {
    if (const json* v = find(key)) {
      Section s(*v, path(key));
      read(s);
    }
  }

 private:
  const json* find(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  std::string path(const char* key) const { return where_ + "." + key; }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void read_train(Section& s, gen::TrainConfig& t) {
  s.get("epochs", t.epochs);
  s.get("batch_size", t.batch_size);
  s.get("lr", t.lr);
  s.get("kl_anneal_fraction", t.kl_anneal_fraction);
}

json train_json(const gen::TrainConfig& t) {
  return {{"epochs", t.epochs}, {"batch_size", t.batch_size}, {"lr", t.lr}, {"kl_anneal_fraction", t.kl_anneal_fraction}};
}

}  // namespace

RunConfig::RunConfig() {
  model.vocab_size = chem::Vocabulary::default_vocabulary().size();
  joint.epochs = 20;
}

RunConfig RunConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::kConfig, std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  std::string as_mode = c.reward.as_mode == reward::AsMode::kReward ? "reward" : "dock_only";
  {
    Section root(j, "config");
    root.get("seed", c.seed);
    root.get("out_dir", c.out_dir);
    root.section("model", [&](Section& s) {
      s.get("embed_dim", c.model.embed_dim);
      s.get("hidden", c.model.hidden);
      s.get("layers", c.model.layers);
      s.get("latent", c.model.latent);
      s.get("genes", c.model.genes);
      s.get("exp_hidden", c.model.exp_hidden);
      s.get("dropout", c.model.dropout);
      s.get("max_len", c.model.max_len);
    });
    root.section("data", [&](Section& s) {
      s.get("corpus", c.data.corpus);
      s.get("synth_corpus_size", c.data.synth_corpus_size);
      s.get("triplets", c.data.triplets);
      s.get("synth_noise", c.data.synth_noise);
      s.get("cell_lines", c.data.cell_lines);
      s.get("profiles", c.data.profiles);
      s.get("reference", c.data.reference);
    });
    root.section("pretrain", [&](Section& s) { read_train(s, c.pretrain); });
    root.section("joint", [&](Section& s) { read_train(s, c.joint); });
    root.section("finetune", [&](Section& s) {
      s.get("steps", c.finetune.steps);
      s.get("batch_size", c.finetune.batch_size);
      s.get("lr", c.finetune.lr);
      s.get("alpha", c.finetune.weights.alpha);
      s.get("beta", c.finetune.weights.beta);
      s.get("lambda", c.finetune.weights.lambda);
      s.get("gamma", c.finetune.weights.gamma);
      s.get("baseline", c.finetune.weights.baseline);
      s.get("oracle_retries", c.finetune.oracle_retries);
    });
    root.section("reward", [&](Section& s) {
      s.get("k", c.reward.k);
      s.get("qed_threshold", c.reward.qed_threshold);
      s.get("as_mode", as_mode);
    });
    root.section("oracle", [&](Section& s) {
      s.get("kind", c.oracle.kind);
      s.get("spec", c.oracle.spec);
      s.get("seed", c.oracle.seed);
      s.get("command", c.oracle.command);
      s.get("workdir", c.oracle.workdir);
      s.get("timeout_s", c.oracle.timeout_s);
    });
    root.section("sample", [&](Section& s) {
      s.get("n", c.sample.n);
      s.get("mode", c.sample.mode);
      s.get("retry_factor", c.sample.retry_factor);
      s.get("checkpoint", c.sample.checkpoint);
    });
  }
  if (as_mode == "reward") c.reward.as_mode = reward::AsMode::kReward;
  else if (as_mode == "dock_only") c.reward.as_mode = reward::AsMode::kDockOnly;
  else bad("config.reward.as_mode", "expected \"reward\" or \"dock_only\"");
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const Error&) {
    throw Error(Errc::kConfig, "cannot read config file " + path);
  }
  return from_json(text);
}

std::string RunConfig::to_json() const {
  const json j = {
      {"seed", seed},
      {"out_dir", out_dir},
      {"model",
       {{"embed_dim", model.embed_dim},
        {"hidden", model.hidden},
        {"layers", model.layers},
        {"latent", model.latent},
        {"genes", model.genes},
        {"exp_hidden", model.exp_hidden},
        {"dropout", model.dropout},
        {"max_len", model.max_len}}},
      {"data",
       {{"corpus", data.corpus},
        {"synth_corpus_size", data.synth_corpus_size},
        {"triplets", data.triplets},
        {"synth_noise", data.synth_noise},
        {"cell_lines", data.cell_lines},
        {"profiles", data.profiles},
        {"reference", data.reference}}},
      {"pretrain", train_json(pretrain)},
      {"joint", train_json(joint)},
      {"finetune",
       {{"steps", finetune.steps},
        {"batch_size", finetune.batch_size},
        {"lr", finetune.lr},
        {"alpha", finetune.weights.alpha},
        {"beta", finetune.weights.beta},
        {"lambda", finetune.weights.lambda},
        {"gamma", finetune.weights.gamma},
        {"baseline", finetune.weights.baseline},
        {"oracle_retries", finetune.oracle_retries}}},
      {"reward",
       {{"k", reward.k},
        {"qed_threshold", reward.qed_threshold},
        {"as_mode", reward.as_mode == reward::AsMode::kReward ? "reward" : "dock_only"}}},
      {"oracle",
       {{"kind", oracle.kind},
        {"spec", oracle.spec},
        {"seed", oracle.seed},
        {"command", oracle.command},
        {"workdir", oracle.workdir},
        {"timeout_s", oracle.timeout_s}}},
      {"sample",
       {{"n", sample.n}, {"mode", sample.mode}, {"retry_factor", sample.retry_factor}, {"checkpoint", sample.checkpoint}}},
  };
  return j.dump(2) + "\n";
}

void RunConfig::validate() const {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw Error(Errc::kConfig, what);
  };
  try {
    model.validate();
    reward.validate();
  } catch (const Error& e) {
    throw Error(Errc::kConfig, e.what());
  }
  check(!out_dir.empty(), "out_dir must not be empty");
  check(data.synth_corpus_size > 0, "data.synth_corpus_size must be positive");
  check(data.synth_noise >= 0.0, "data.synth_noise must be non-negative");
  check(data.cell_lines > 0, "data.cell_lines must be positive");
  check(data.profiles > 0, "data.profiles must be positive");
  for (const auto* t : {&pretrain, &joint}) {
    check(t->epochs >= 0, "epochs must be non-negative");
    check(t->batch_size > 0, "batch_size must be positive");
    check(t->lr > 0.0, "lr must be positive");
    check(t->kl_anneal_fraction >= 0.0 && t->kl_anneal_fraction <= 1.0, "kl_anneal_fraction must lie in [0, 1]");
  }
  check(finetune.steps >= 0, "finetune.steps must be non-negative");
  check(finetune.batch_size >= 2, "finetune.batch_size must be at least 2");
  check(finetune.lr > 0.0, "finetune.lr must be positive");
  const auto& w = finetune.weights;
  check(w.alpha >= 0 && w.beta >= 0 && w.lambda >= 0 && w.gamma >= 0, "loss weights must be non-negative");
  check(finetune.oracle_retries >= 0, "finetune.oracle_retries must be non-negative");
  check(oracle.kind == "mock" || oracle.kind == "external", "oracle.kind must be \"mock\" or \"external\"");
  check(oracle.kind != "external" || !oracle.command.empty(), "oracle.command is required for an external oracle");
  check(oracle.timeout_s > 0.0, "oracle.timeout_s must be positive");
  check(sample.n >= 0, "sample.n must be non-negative");
  check(sample.mode == "sample" || sample.mode == "greedy", "sample.mode must be \"sample\" or \"greedy\"");
  check(sample.retry_factor >= 1, "sample.retry_factor must be at least 1");
}

}  // namespace phenogen::cli
