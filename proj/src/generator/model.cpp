#include "phenogen/generator/model.h"

#include <cmath>
#include <random>

#include "phenogen/error.h"
#include "phenogen/hash.h"

namespace phenogen::gen {
namespace {

const char* const kGates[] = {"wz", "wr", "wh", "uz", "ur", "uh", "bz", "br", "bh"};

void add_gru(nn::ParamStore& p, const std::string& prefix, int input, int hidden) {
  for (const char* g : kGates) {
    const int cols = g[0] == 'w' ? input : hidden;
    const int rows = g[0] == 'b' ? 1 : hidden;
    p.emplace(prefix + g, nn::Tensor(rows, cols));
  }
}

void add_dense(nn::ParamStore& p, const std::string& prefix, int input, int output) {
  p.emplace(prefix + "w", nn::Tensor(output, input));
  p.emplace(prefix + "b", nn::Tensor(1, output));
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Dense biases take the fan-in of their weight; GRU biases and weights use
// their own column count.
int fan_in(const nn::ParamStore& p, const std::string& name) {
  if (ends_with(name, ".b")) return p.at(name.substr(0, name.size() - 1) + "w").cols();
  return p.at(name).cols();
}

}  // namespace

void ModelConfig::validate() const {
  auto positive = [](int v, const char* what) {
    if (v <= 0) throw Error(Errc::kInvalidArgument, std::string(what) + " must be positive");
  };
  positive(vocab_size, "vocab_size");
  positive(embed_dim, "embed_dim");
  positive(hidden, "hidden");
  positive(layers, "layers");
  positive(latent, "latent");
  positive(genes, "genes");
  positive(max_len, "max_len");
  for (int h : exp_hidden) positive(h, "exp_hidden entry");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw Error(Errc::kInvalidArgument, "dropout must lie in [0, 1)");
}

bool in_block(const std::string& name, std::string_view prefix) {
  return name.compare(0, prefix.size(), prefix) == 0;
}

ModelParams init_params(const ModelConfig& c, std::uint64_t seed) {
  c.validate();
  ModelParams m;
  m.config = c;
  nn::ParamStore& p = m.tensors;
  const std::string enc(kMolEncoder), dec(kMolDecoder), xenc(kExpEncoder), xdec(kExpDecoder);

  p.emplace(enc + "embed", nn::Tensor(c.vocab_size, c.embed_dim));
  for (int l = 0; l < c.layers; ++l) {
    const int in = l == 0 ? c.embed_dim : c.hidden;
    add_gru(p, enc + "fwd." + std::to_string(l) + ".", in, c.hidden);
    add_gru(p, enc + "bwd." + std::to_string(l) + ".", in, c.hidden);
  }
  add_dense(p, enc + "mu.", 2 * c.hidden, c.latent);
  add_dense(p, enc + "logvar.", 2 * c.hidden, c.latent);

  p.emplace(dec + "embed", nn::Tensor(c.vocab_size, c.embed_dim));
  for (int l = 0; l < c.layers; ++l) {
    add_dense(p, dec + "init." + std::to_string(l) + ".", c.latent, c.hidden);
    add_gru(p, dec + "gru." + std::to_string(l) + ".", l == 0 ? c.embed_dim + c.latent : c.hidden, c.hidden);
  }
  add_dense(p, dec + "out.", c.hidden, c.vocab_size);

  int width = c.genes;
  for (std::size_t i = 0; i < c.exp_hidden.size(); ++i) {
    add_dense(p, xenc + std::to_string(i) + ".", width, c.exp_hidden[i]);
    width = c.exp_hidden[i];
  }
  add_dense(p, xenc + "mu.", width, c.latent);
  add_dense(p, xenc + "logvar.", width, c.latent);

  width = c.latent;
  for (std::size_t i = 0; i < c.exp_hidden.size(); ++i) {
    const int out = c.exp_hidden[c.exp_hidden.size() - 1 - i];
    add_dense(p, xdec + std::to_string(i) + ".", width, out);
    width = out;
  }
  add_dense(p, xdec + "out.", width, c.genes);

  for (auto& [name, t] : p) {
    std::mt19937_64 rng(derive_seed(seed, fnv1a(name)));
    const double bound = ends_with(name, "embed") ? 0.1 : 1.0 / std::sqrt(static_cast<double>(fan_in(p, name)));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = u(rng);
  }
  return m;
}

BoundModel::BoundModel(nn::Tape& tape, const ModelParams& params, nn::ParamStore* grads, Filter trainable)
    : tape_(&tape), config_(&params.config) {
  for (const auto& [name, t] : params.tensors) {
    nn::Tensor* g = nullptr;
    if (grads && (!trainable || trainable(name))) g = &grads->try_emplace(name, t.rows(), t.cols()).first->second;
    vars_.emplace(name, tape.param(t, g));
  }
}

nn::Var BoundModel::operator[](const std::string& name) const {
  auto it = vars_.find(name);
  if (it == vars_.end()) throw Error(Errc::kShapeMismatch, "model has no parameter " + name);
  return it->second;
}

}  // namespace phenogen::gen
