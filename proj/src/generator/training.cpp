#include "phenogen/generator/training.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "phenogen/chem/tokenizer.h"
#include "phenogen/error.h"
#include "phenogen/generator/networks.h"
#include "phenogen/hash.h"
#include "phenogen/nn/adam.h"
#include "phenogen/nn/ops.h"

namespace phenogen::gen {
namespace {

bool molvae_block(const std::string& name) { return in_block(name, kMolEncoder) || in_block(name, kMolDecoder); }

bool joint_block(const std::string& name) {
  return in_block(name, kExpEncoder) || in_block(name, kExpDecoder) || in_block(name, kMolDecoder);
}

std::vector<std::vector<int>> batches(int n, int batch_size, std::uint64_t seed, int epoch) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(derive_seed(seed, 0x5eed, static_cast<std::uint64_t>(epoch)));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<int>> out;
  for (int i = 0; i < n; i += batch_size) {
    out.emplace_back(order.begin() + i, order.begin() + std::min(n, i + batch_size));
  }
  return out;
}

long batches_per_epoch(int n, int batch_size) { return (n + batch_size - 1) / batch_size; }

// Runs `step` with tape errors surfaced as divergence.
template <typename F>
void guarded(F&& step, int epoch) {
  try {
    step();
  } catch (const Error& e) {
    if (e.code() == Errc::kNonFinite) {
      throw Error(Errc::kDivergedLoss, "training diverged in epoch " + std::to_string(epoch) + ": " + e.what());
    }
    throw;
  }
}

// Epoch accumulator: batch-size weighted means of named terms.
class EpochMeans {
 public:
  void add(const std::string& term, double value, int weight) {
    auto& [sum, n] = terms_[term];
    sum += value * weight;
    n += weight;
  }
  void flush(int epoch, const std::vector<std::string>& order, std::vector<LossRecord>& log) {
    for (const auto& term : order) {
      const auto& [sum, n] = terms_[term];
      log.push_back({epoch, term, n > 0 ? sum / n : 0.0});
    }
    terms_.clear();
  }

 private:
  std::map<std::string, std::pair<double, int>> terms_;
};

void check_batch_size(int batch_size) {
  if (batch_size < 1) throw Error(Errc::kInvalidArgument, "batch_size must be positive");
}

}  // namespace

std::string format_loss_log(const std::vector<LossRecord>& log) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& r : log) out << r.epoch << '\t' << r.term << '\t' << r.value << '\n';
  return out.str();
}

std::vector<double> profile_delta(const TripletRecord& t) {
  if (t.perturbed.size() != t.unperturbed.size()) {
    throw Error(Errc::kGeneCountMismatch, "perturbed and unperturbed profiles differ in length");
  }
  std::vector<double> d(t.perturbed.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = t.perturbed[i] - t.unperturbed[i];
  return d;
}

double kl_weight(long step, long total, double anneal_fraction) {
  const double ramp = anneal_fraction * static_cast<double>(total);
  if (ramp <= 0.0) return 1.0;
  return std::min(1.0, static_cast<double>(step) / ramp);
}

TrainResult pretrain_molvae(const std::vector<std::string>& corpus, const ModelParams& init,
                            const TrainConfig& config, const chem::Vocabulary& vocab) {
  if (corpus.empty()) throw Error(Errc::kEmptyCorpus, "pretraining corpus is empty");
  check_batch_size(config.batch_size);
  std::vector<chem::TokenSequence> seqs;
  for (const auto& s : corpus) seqs.push_back(chem::tokenize(s, vocab, init.config.max_len));

  TrainResult result{init, {}};
  nn::AdamState adam(nn::AdamConfig{config.lr});
  const int n = static_cast<int>(seqs.size());
  const long total = batches_per_epoch(n, config.batch_size) * config.epochs;
  long step = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    EpochMeans means;
    int bi = 0;
    for (const auto& idx : batches(n, config.batch_size, config.seed, epoch)) {
      const double klw = kl_weight(step, total, config.kl_anneal_fraction);
      guarded([&] {
        std::vector<chem::TokenSequence> batch;
        for (int i : idx) batch.push_back(seqs[i]);
        std::mt19937_64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(epoch), static_cast<std::uint64_t>(bi)));
        const DropoutCtx drop{init.config.dropout, &rng};
        nn::ParamStore grads;
        nn::Tape tape;
        const BoundModel m(tape, result.params, &grads, molvae_block);
        const Gaussian q = encode_molecules(m, batch, drop);
        const nn::Var z = reparameterize(q, rng);
        const TeacherForced tf = teacher_force(m, z, batch, vocab, drop);
        const nn::Var nll = nn::mean(nn::scale(tf.logp, -1.0));
        const nn::Var kl = nn::mean(gaussian_kl(q));
        const nn::Var loss = nn::add(nll, nn::scale(kl, klw));
        tape.backward(loss);
        nn::adam_step(result.params.tensors, grads, adam);
        const int w = static_cast<int>(idx.size());
        means.add("recon_nll", nll.item(), w);
        means.add("kl", kl.item(), w);
        means.add("kl_weight", klw, w);
        means.add("total", loss.item(), w);
      }, epoch);
      ++step;
      ++bi;
    }
    means.flush(epoch, {"recon_nll", "kl", "kl_weight", "total"}, result.log);
  }
  return result;
}

TrainResult joint_train(const std::vector<TripletRecord>& triplets, const ModelParams& molvae,
                        const TrainConfig& config, const chem::Vocabulary& vocab) {
  if (triplets.empty()) throw Error(Errc::kEmptyCorpus, "no triplets for joint training");
  check_batch_size(config.batch_size);
  const ModelConfig& c = molvae.config;
  std::vector<chem::TokenSequence> seqs;
  std::vector<std::vector<double>> deltas;
  for (const auto& t : triplets) {
    if (static_cast<int>(t.perturbed.size()) != c.genes || static_cast<int>(t.unperturbed.size()) != c.genes) {
      throw Error(Errc::kGeneCountMismatch, "triplet for " + t.smiles + " has " + std::to_string(t.perturbed.size()) +
                                                " genes, model expects " + std::to_string(c.genes));
    }
    seqs.push_back(chem::tokenize(t.smiles, vocab, c.max_len));
    deltas.push_back(profile_delta(t));
  }

  TrainResult result{molvae, {}};
  nn::AdamState adam(nn::AdamConfig{config.lr});
  const int n = static_cast<int>(seqs.size());
  const long total = batches_per_epoch(n, config.batch_size) * config.epochs;
  long step = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    EpochMeans means;
    int bi = 0;
    for (const auto& idx : batches(n, config.batch_size, config.seed, epoch)) {
      const double klw = kl_weight(step, total, config.kl_anneal_fraction);
      guarded([&] {
        const int B = static_cast<int>(idx.size());
        std::vector<chem::TokenSequence> batch;
        nn::Tensor profiles(B, c.genes);
        for (int r = 0; r < B; ++r) {
          batch.push_back(seqs[idx[r]]);
          for (int g = 0; g < c.genes; ++g) profiles(r, g) = deltas[idx[r]][g];
        }
        std::mt19937_64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(epoch), static_cast<std::uint64_t>(bi)));
        const DropoutCtx drop{c.dropout, &rng};
        nn::ParamStore grads;
        nn::Tape tape;
        const BoundModel m(tape, result.params, &grads, joint_block);
        const nn::Var x = tape.constant(profiles);
        const Gaussian q_exp = encode_expression(m, x, drop);
        // The frozen molecule encoder runs without dropout.
        const Gaussian q_mol = encode_molecules(m, batch);
        const nn::Var z = reparameterize(q_exp, rng);
        const TeacherForced tf = teacher_force(m, z, batch, vocab, drop);
        const nn::Var nll = nn::mean(nn::scale(tf.logp, -1.0));
        const nn::Var mse = nn::mean(nn::square(nn::sub(decode_profile(m, z, drop), x)));
        const nn::Var kl_prior = nn::mean(gaussian_kl(q_exp));
        const nn::Var kl_align = nn::mean(gaussian_kl_between(q_exp, q_mol));
        const nn::Var loss = nn::add(nn::add(nll, mse), nn::scale(nn::add(kl_prior, kl_align), klw));
        tape.backward(loss);
        nn::adam_step(result.params.tensors, grads, adam);
        means.add("recon_nll", nll.item(), B);
        means.add("profile_mse", mse.item(), B);
        means.add("kl_prior", kl_prior.item(), B);
        means.add("kl_align", kl_align.item(), B);
        means.add("kl_weight", klw, B);
        means.add("total", loss.item(), B);
      }, epoch);
      ++step;
      ++bi;
    }
    means.flush(epoch, {"recon_nll", "profile_mse", "kl_prior", "kl_align", "kl_weight", "total"}, result.log);
  }
  return result;
}

}  // namespace phenogen::gen
