#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "phenogen/chem/tokenizer.h"
#include "phenogen/error.h"
#include "phenogen/generator/networks.h"
#include "phenogen/generator/sampling.h"
#include "phenogen/generator/training.h"
#include "phenogen/io/corpus.h"
#include "phenogen/io/triplets.h"

namespace phenogen::gen {
namespace {

using chem::TokenSequence;
using chem::Vocabulary;
using nn::Tensor;

const Vocabulary& V() { return Vocabulary::default_vocabulary(); }

// {<pad>, <bos>, <eos>, C, N, O}: four emittable classes.
const Vocabulary& tiny_vocab() {
  static const Vocabulary v({"<pad>", "<bos>", "<eos>", "C", "N", "O"});
  return v;
}

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return Errc::kInvalidArgument;
}

ModelConfig tiny_config(int vocab_size, int layers = 2) {
  ModelConfig c;
  c.vocab_size = vocab_size;
  c.embed_dim = 3;
  c.hidden = 4;
  c.layers = layers;
  c.latent = 2;
  c.genes = 8;
  c.exp_hidden = {5, 3};
  return c;
}

ModelParams zeroed(ModelParams p) {
  for (auto& [name, t] : p.tensors) t.fill(0.0);
  return p;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Straight-line re-evaluation of the decoder with plain loops.
using Vec = std::vector<double>;

Vec affine(const Tensor& w, const Tensor& b, const Vec& x) {
  Vec y(w.rows());
  for (int i = 0; i < w.rows(); ++i) {
    double s = b.rows() ? b(0, i) : 0.0;
    for (int j = 0; j < w.cols(); ++j) s += w(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Vec matvec(const Tensor& u, const Vec& x) { return affine(u, Tensor(), x); }

double manual_log_likelihood(const ModelParams& p, const std::vector<int>& ids, const Vec& z, const Vocabulary& vocab) {
  const auto& T = p.tensors;
  const ModelConfig& c = p.config;
  std::vector<Vec> h;
  for (int l = 0; l < c.layers; ++l) {
    const std::string k = "mol_dec.init." + std::to_string(l) + ".";
    h.push_back(affine(T.at(k + "w"), T.at(k + "b"), z));
  }
  double total = 0.0;
  for (std::size_t t = 0; t + 1 < ids.size(); ++t) {
    Vec x;
    for (int e = 0; e < c.embed_dim; ++e) x.push_back(T.at("mol_dec.embed")(ids[t], e));
    x.insert(x.end(), z.begin(), z.end());
    for (int l = 0; l < c.layers; ++l) {
      const std::string k = "mol_dec.gru." + std::to_string(l) + ".";
      const Vec az = affine(T.at(k + "wz"), T.at(k + "bz"), x), uz = matvec(T.at(k + "uz"), h[l]);
      const Vec ar = affine(T.at(k + "wr"), T.at(k + "br"), x), ur = matvec(T.at(k + "ur"), h[l]);
      Vec zg(c.hidden), rg(c.hidden), rh(c.hidden);
      for (int i = 0; i < c.hidden; ++i) {
        zg[i] = sigmoid(az[i] + uz[i]);
        rg[i] = sigmoid(ar[i] + ur[i]);
        rh[i] = rg[i] * h[l][i];
      }
      const Vec ah = affine(T.at(k + "wh"), T.at(k + "bh"), x), uh = matvec(T.at(k + "uh"), rh);
      for (int i = 0; i < c.hidden; ++i) h[l][i] = (1 - zg[i]) * std::tanh(ah[i] + uh[i]) + zg[i] * h[l][i];
      x = h[l];
    }
    const Vec logits = affine(T.at("mol_dec.out.w"), T.at("mol_dec.out.b"), x);
    long double norm = 0.0L;
    for (int v = 0; v < vocab.size(); ++v) {
      if (v != vocab.pad_id() && v != vocab.bos_id()) norm += std::exp(static_cast<long double>(logits[v]));
    }
    total += logits[ids[t + 1]] - static_cast<double>(std::log(norm));
  }
  return total;
}

// Single-layer, width-1 decoder that spells "CC" and stops. The GRU update
// gate is shut and the reset gate open, so h_t = tanh(0.5 + h_{t-1}) visits
// 0.462, 0.745, 0.847; the output layer prefers C while h < 0.8 and EOS after.
ModelParams cc_model(double sharpness) {
  ModelConfig c = tiny_config(6, 1);
  c.embed_dim = 1;
  c.hidden = 1;
  c.latent = 1;
  ModelParams p = zeroed(init_params(c, 1));
  auto& T = p.tensors;
  T.at("mol_dec.gru.0.bz")(0, 0) = -50.0;
  T.at("mol_dec.gru.0.br")(0, 0) = 50.0;
  T.at("mol_dec.gru.0.uh")(0, 0) = 1.0;
  T.at("mol_dec.gru.0.bh")(0, 0) = 0.5;
  Tensor& w = T.at("mol_dec.out.w");
  Tensor& b = T.at("mol_dec.out.b");
  const auto& v = tiny_vocab();
  for (int k = 0; k < v.size(); ++k) b(0, k) = -sharpness;
  const int C = *v.id("C");
  w(C, 0) = -sharpness;
  b(0, C) = 0.8 * sharpness;
  w(v.eos_id(), 0) = sharpness;
  b(0, v.eos_id()) = -0.8 * sharpness;
  return p;
}

TEST(EncodeExpression, ZeroWeightsReturnHeadBiases) {
  ModelParams p = zeroed(init_params(tiny_config(40), 3));
  for (int j = 0; j < 2; ++j) {
    p.tensors.at("exp_enc.mu.b")(0, j) = 0.25 * (j + 1);
    p.tensors.at("exp_enc.logvar.b")(0, j) = -0.5 * (j + 1);
  }
  const auto [mu, lv] = encode_expression(p, Tensor(2, 8, 1.7));
  for (int b = 0; b < 2; ++b) {
    for (int j = 0; j < 2; ++j) {
      EXPECT_EQ(mu(b, j), 0.25 * (j + 1));
      EXPECT_EQ(lv(b, j), -0.5 * (j + 1));
    }
  }
}

TEST(EncodeExpression, MatchesStraightLineFfn) {
  const ModelParams p = init_params(tiny_config(40), 11);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  Vec x(8);
  for (double& v : x) v = n01(rng);
  const auto [mu, lv] = encode_expression(p, Tensor(1, 8, x));
  const auto& T = p.tensors;
  Vec h = x;
  for (int i = 0; i < 2; ++i) {
    h = affine(T.at("exp_enc." + std::to_string(i) + ".w"), T.at("exp_enc." + std::to_string(i) + ".b"), h);
    for (double& v : h) v = std::tanh(v);
  }
  const Vec want_mu = affine(T.at("exp_enc.mu.w"), T.at("exp_enc.mu.b"), h);
  const Vec want_lv = affine(T.at("exp_enc.logvar.w"), T.at("exp_enc.logvar.b"), h);
  for (int j = 0; j < 2; ++j) {
    EXPECT_NEAR(mu(0, j), want_mu[j], 1e-12);
    EXPECT_NEAR(lv(0, j), want_lv[j], 1e-12);
  }
  const auto again = encode_expression(p, Tensor(1, 8, x));
  EXPECT_EQ(again.first, mu);
  EXPECT_EQ(again.second, lv);
}

TEST(EncodeExpression, WrongGeneCountIsShapeMismatch) {
  const ModelParams p = init_params(tiny_config(40), 11);
  EXPECT_EQ(code_of([&] { encode_expression(p, Tensor(1, 7)); }), Errc::kShapeMismatch);
}

TEST(Reparameterize, DegenerateVarianceReturnsMu) {
  const Tensor mu(1, 3, {0.5, -1.0, 2.0});
  const Tensor z = sample_latents(mu, Tensor(1, 3, -41.0), {9});
  EXPECT_EQ(z, mu);
}

TEST(Reparameterize, SeededAndRowIndependent) {
  const Tensor mu(2, 3, 0.0), lv(2, 3, 0.0);
  const Tensor a = sample_latents(mu, lv, {1, 2});
  EXPECT_EQ(a, sample_latents(mu, lv, {1, 2}));
  const Tensor b = sample_latents(Tensor(1, 3), Tensor(1, 3), {2});
  for (int j = 0; j < 3; ++j) EXPECT_EQ(a(1, j), b(0, j));
}

TEST(Reparameterize, MonteCarloMeanWithinThreeSigma) {
  const int N = 100000;
  const double mu[2] = {1.5, -0.25};
  const double lv[2] = {std::log(4.0), 0.0};
  Tensor m(N, 2), l(N, 2);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < 2; ++j) {
      m(i, j) = mu[j];
      l(i, j) = lv[j];
    }
  }
  nn::Tape tape;
  std::mt19937_64 rng(2024);
  const Tensor z = reparameterize({tape.constant(m), tape.constant(l)}, rng).value();
  for (int j = 0; j < 2; ++j) {
    double s = 0.0;
    for (int i = 0; i < N; ++i) s += z(i, j);
    const double sigma = std::exp(lv[j] / 2);
    EXPECT_LT(std::abs(s / N - mu[j]), 3 * sigma / std::sqrt(double{N}));
  }
}

TEST(GaussianKl, ClosedForms) {
  nn::Tape tape;
  EXPECT_EQ(gaussian_kl({tape.constant(Tensor(1, 4)), tape.constant(Tensor(1, 4))}).value()(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(gaussian_kl({tape.constant(Tensor(1, 4, 1.0)), tape.constant(Tensor(1, 4))}).value()(0, 0), 2.0);
  const Gaussian q{tape.constant(Tensor(1, 3, {0.3, -0.2, 1.0})), tape.constant(Tensor(1, 3, {0.1, -0.7, 0.4}))};
  EXPECT_NEAR(gaussian_kl_between(q, q).value()(0, 0), 0.0, 1e-15);
  const Gaussian std_normal{tape.constant(Tensor(1, 3)), tape.constant(Tensor(1, 3))};
  EXPECT_NEAR(gaussian_kl_between(q, std_normal).value()(0, 0), gaussian_kl(q).value()(0, 0), 1e-15);
}

TEST(GaussianKl, MatchesExtendedPrecision) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Tensor mu(5, 6), lv(5, 6);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    mu[i] = u(rng);
    lv[i] = u(rng);
  }
  nn::Tape tape;
  const Tensor kl = gaussian_kl({tape.constant(mu), tape.constant(lv)}).value();
  for (int b = 0; b < 5; ++b) {
    long double want = 0.0L;
    for (int j = 0; j < 6; ++j) {
      const long double m = mu(b, j), l = lv(b, j);
      want += 0.5L * (std::exp(l) + m * m - 1.0L - l);
    }
    EXPECT_NEAR(kl(b, 0), static_cast<double>(want), 1e-12);
  }
}

TEST(Decode, GreedyIsDeterministicAndSampleIsSeeded) {
  const ModelParams p = init_params(tiny_config(40), 21);
  const Tensor z(3, 2, {0.1, -0.3, 1.0, 0.5, -1.2, 0.0});
  const auto g1 = decode_batch(p, z, DecodeMode::kGreedy, {1, 2, 3}, V(), 30);
  const auto g2 = decode_batch(p, z, DecodeMode::kGreedy, {7, 8, 9}, V(), 30);
  EXPECT_EQ(g1, g2);
  const auto s1 = decode_batch(p, z, DecodeMode::kSample, {1, 2, 3}, V(), 30);
  EXPECT_EQ(s1, decode_batch(p, z, DecodeMode::kSample, {1, 2, 3}, V(), 30));
  // a row's draw depends only on its own seed and latent
  const auto alone = decode_batch(p, Tensor(1, 2, {1.0, 0.5}), DecodeMode::kSample, {2}, V(), 30);
  EXPECT_EQ(alone[0], s1[1]);
  for (const auto& s : s1) EXPECT_TRUE(chem::is_well_formed(s, V()));
}

TEST(Decode, AllMassOnEosGivesEmptyMolecule) {
  ModelParams p = zeroed(init_params(tiny_config(40), 1));
  p.tensors.at("mol_dec.out.b")(0, V().eos_id()) = 100.0;
  std::mt19937_64 rng(3);
  const TokenSequence s = decode(p, {0.4, -0.4}, DecodeMode::kSample, rng, V(), 100);
  EXPECT_EQ(s.ids, (std::vector<int>{V().bos_id(), V().eos_id()}));
  EXPECT_FALSE(s.truncated);
  EXPECT_EQ(chem::detokenize(s, V()), "");
}

TEST(Decode, HandBuiltDecoderSpellsCC) {
  const ModelParams p = cc_model(1e4);
  std::mt19937_64 rng(1);
  for (DecodeMode mode : {DecodeMode::kGreedy, DecodeMode::kSample}) {
    const TokenSequence s = decode(p, {0.0}, mode, rng, tiny_vocab(), 10);
    EXPECT_EQ(chem::detokenize(s, tiny_vocab()), "CC");
    EXPECT_EQ(s.ids.back(), tiny_vocab().eos_id());
  }
}

TEST(Decode, TruncationAtMaxLenIsFlagged) {
  const ModelParams p = cc_model(1e4);
  std::mt19937_64 rng(1);
  const TokenSequence s = decode(p, {0.0}, DecodeMode::kGreedy, rng, tiny_vocab(), 1);
  EXPECT_TRUE(s.truncated);
  EXPECT_EQ(s.ids, (std::vector<int>{tiny_vocab().bos_id(), *tiny_vocab().id("C")}));
  EXPECT_TRUE(chem::is_well_formed(s, tiny_vocab()));
}

TEST(LogLikelihood, UniformPolicyOverFourClasses) {
  const ModelParams p = zeroed(init_params(tiny_config(6), 1));
  const auto& v = tiny_vocab();
  const TokenSequence s{{v.bos_id(), *v.id("C"), *v.id("C"), v.eos_id()}, 100, false};
  EXPECT_NEAR(sequence_log_likelihood(p, s, {0.3, 0.2}, v), 3 * std::log(0.25), 1e-12);
  EXPECT_NEAR(3 * std::log(0.25), -4.1588830833596715, 1e-15);
}

TEST(LogLikelihood, ProbabilityOnePathIsZero) {
  const auto& v = tiny_vocab();
  const TokenSequence s{{v.bos_id(), *v.id("C"), *v.id("C"), v.eos_id()}, 100, false};
  EXPECT_NEAR(sequence_log_likelihood(cc_model(1e4), s, {0.0}, v), 0.0, 1e-12);
}

TEST(LogLikelihood, MatchesManualForward) {
  const ModelParams p = init_params(tiny_config(40, 3), 31);
  const std::vector<std::string> smiles = {"CCO", "c1ccccc1N", "C(=O)Cl"};
  std::vector<TokenSequence> seqs;
  for (const auto& s : smiles) seqs.push_back(chem::tokenize(s, V()));
  const Tensor z(3, 2, {0.7, -0.1, 0.0, 0.0, -1.5, 2.0});
  const auto batch = sequence_log_likelihoods(p, seqs, z, V());
  for (int b = 0; b < 3; ++b) {
    const Vec zb = {z(b, 0), z(b, 1)};
    const double want = manual_log_likelihood(p, seqs[b].ids, zb, V());
    EXPECT_NEAR(batch[b], want, 1e-12) << smiles[b];
    EXPECT_NEAR(sequence_log_likelihood(p, seqs[b], zb, V()), want, 1e-12);
  }
}

TEST(LogLikelihood, NormalizesOverAllBoundedSequences) {
  // Every sequence of at most 3 generated tokens: those ending in EOS plus
  // the truncated 3-token prefixes partition the probability mass.
  const ModelParams p = init_params(tiny_config(6, 2), 41);
  const auto& v = tiny_vocab();
  const std::vector<int> body = {*v.id("C"), *v.id("N"), *v.id("O")};
  const Vec z = {0.4, -0.9};
  double mass = 0.0;
  std::function<void(std::vector<int>)> walk = [&](std::vector<int> ids) {
    auto done = ids;
    done.push_back(v.eos_id());
    mass += std::exp(sequence_log_likelihood(p, {done, 3, false}, z, v));
    for (int t : body) {
      auto next = ids;
      next.push_back(t);
      if (next.size() == 4) {
        mass += std::exp(sequence_log_likelihood(p, {next, 3, true}, z, v));
      } else {
        walk(next);
      }
    }
  };
  walk({v.bos_id()});
  EXPECT_NEAR(mass, 1.0, 1e-9);
}

TEST(Pretrain, ZeroEpochsReturnsInitialization) {
  const ModelParams init = init_params(tiny_config(40), 3);
  TrainConfig tc;
  tc.epochs = 0;
  const TrainResult r = pretrain_molvae({"CCO", "CCN"}, init, tc, V());
  EXPECT_EQ(r.params, init);
  EXPECT_TRUE(r.log.empty());
}

TEST(Pretrain, EmptyCorpusIsRejected) {
  EXPECT_EQ(code_of([] { pretrain_molvae({}, init_params(tiny_config(40), 3), TrainConfig{}, V()); }),
            Errc::kEmptyCorpus);
}

TEST(Pretrain, SeededRunsAreBitIdenticalAndOnlyTouchMolecularBlocks) {
  const ModelParams init = init_params(tiny_config(40), 3);
  TrainConfig tc;
  tc.epochs = 2;
  tc.batch_size = 4;
  const auto corpus = io::synth_corpus(12, 2);
  const TrainResult a = pretrain_molvae(corpus, init, tc, V());
  const TrainResult b = pretrain_molvae(corpus, init, tc, V());
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(format_loss_log(a.log), format_loss_log(b.log));
  for (const auto& [name, t] : init.tensors) {
    const bool mol = in_block(name, kMolEncoder) || in_block(name, kMolDecoder);
    if (!mol) {
      EXPECT_EQ(a.params.tensors.at(name), t) << name;
    }
  }
  EXPECT_NE(a.params.tensors.at("mol_enc.mu.w"), init.tensors.at("mol_enc.mu.w"));
}

double term(const std::vector<LossRecord>& log, int epoch, const std::string& name) {
  for (const auto& r : log) {
    if (r.epoch == epoch && r.term == name) return r.value;
  }
  ADD_FAILURE() << "no " << name << " at epoch " << epoch;
  return 0.0;
}

TEST(Pretrain, ToyCorpusReconstructionImproves) {
  ModelConfig c;
  c.layers = 1;
  const auto corpus = io::synth_corpus(200, 1);
  TrainConfig tc;
  tc.epochs = 30;
  tc.seed = 1;
  const TrainResult r = pretrain_molvae(corpus, init_params(c, 1), tc, V());
  const double first = term(r.log, 1, "recon_nll");
  const double last = term(r.log, 30, "recon_nll");
  EXPECT_LT(last, first);
  EXPECT_EQ(term(r.log, 30, "kl_weight"), 1.0);
}

TEST(KlWeight, LinearRampOverFirstThird) {
  EXPECT_EQ(kl_weight(0, 300, 1.0 / 3.0), 0.0);
  EXPECT_NEAR(kl_weight(50, 300, 1.0 / 3.0), 0.5, 1e-12);
  EXPECT_EQ(kl_weight(100, 300, 1.0 / 3.0), 1.0);
  EXPECT_EQ(kl_weight(250, 300, 1.0 / 3.0), 1.0);
  EXPECT_EQ(kl_weight(5, 300, 0.0), 1.0);
}

std::vector<TripletRecord> toy_triplets(int n, int genes) {
  io::SynthConfig sc;
  sc.genes = genes;
  sc.seed = 4;
  return io::synth_triplets(io::synth_corpus(n, 4), sc);
}

TEST(Joint, ZeroEpochsAndFrozenEncoder) {
  const ModelParams init = init_params(tiny_config(40), 3);
  TrainConfig tc;
  tc.epochs = 0;
  const auto triplets = toy_triplets(8, 8);
  EXPECT_EQ(joint_train(triplets, init, tc, V()).params, init);

  tc.epochs = 2;
  tc.batch_size = 4;
  const TrainResult r = joint_train(triplets, init, tc, V());
  for (const auto& [name, t] : init.tensors) {
    if (in_block(name, kMolEncoder)) {
      EXPECT_EQ(r.params.tensors.at(name), t) << name;
    }
  }
  EXPECT_NE(r.params.tensors.at("exp_enc.mu.w"), init.tensors.at("exp_enc.mu.w"));
  EXPECT_NE(r.params.tensors.at("exp_dec.out.w"), init.tensors.at("exp_dec.out.w"));
  EXPECT_NE(r.params.tensors.at("mol_dec.out.w"), init.tensors.at("mol_dec.out.w"));
}

TEST(Joint, GeneCountMismatch) {
  const ModelParams init = init_params(tiny_config(40), 3);
  EXPECT_EQ(code_of([&] { joint_train(toy_triplets(4, 16), init, TrainConfig{}, V()); }), Errc::kGeneCountMismatch);
}

TEST(Joint, HundredTripletsLossDecreases) {
  ModelConfig c;
  c.layers = 1;
  const auto triplets = toy_triplets(100, c.genes);
  TrainConfig tc;
  tc.epochs = 50;
  const TrainResult r = joint_train(triplets, init_params(c, 2), tc, V());
  EXPECT_LT(term(r.log, 50, "total"), term(r.log, 1, "total"));
  EXPECT_LT(term(r.log, 50, "profile_mse"), term(r.log, 1, "profile_mse"));
}

}  // namespace
}  // namespace phenogen::gen
