#include "phenogen/io/checkpoint.h"

#include <bit>
#include <cstring>

#include "phenogen/error.h"
#include "phenogen/hash.h"
#include "phenogen/io/corpus.h"

namespace phenogen::io {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[4] = {'P', 'G', 'C', 'K'};
constexpr std::uint32_t kMaxCount = 1u << 28;

class Writer {
 public:
  template <typename T>
  void put(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void put_string(const std::string& s) {
    put(static_cast<std::uint32_t>(s.size()));
    out_ += s;
  }
  void put_raw(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  std::string& str() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  Reader(const std::string& data, std::size_t end) : data_(data), end_(end) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::uint32_t count() {
    const auto n = get<std::uint32_t>();
    if (n > kMaxCount) throw Error(Errc::kCorruptFile, "checkpoint count field out of range");
    return n;
  }
  std::string get_string() {
    const std::uint32_t n = count();
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void get_raw(void* p, std::size_t n) {
    need(n);
    std::memcpy(p, data_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == end_; }

 private:
  void need(std::size_t n) const {
    if (n > end_ - pos_) throw Error(Errc::kCorruptFile, "checkpoint ends inside a record");
  }
  const std::string& data_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  const gen::ModelConfig& c = ck.params.config;
  Writer w;
  w.put_raw(kMagic, 4);
  w.put(kCheckpointVersion);
  w.put(ck.vocab.hash());
  w.put(static_cast<std::uint32_t>(ck.vocab.size()));
  w.put_string(ck.vocab.to_text());
  for (int v : {c.vocab_size, c.embed_dim, c.hidden, c.layers, c.latent, c.genes, c.max_len}) w.put(static_cast<std::int32_t>(v));
  w.put(static_cast<std::uint32_t>(c.exp_hidden.size()));
  for (int v : c.exp_hidden) w.put(static_cast<std::int32_t>(v));
  w.put(c.dropout);
  w.put(static_cast<std::uint32_t>(ck.meta.size()));
  for (const auto& [k, v] : ck.meta) {
    w.put_string(k);
    w.put_string(v);
  }
  w.put(static_cast<std::uint32_t>(ck.params.tensors.size()));
  for (const auto& [name, t] : ck.params.tensors) {
    w.put_string(name);
    w.put(static_cast<std::uint32_t>(t.rows()));
    w.put(static_cast<std::uint32_t>(t.cols()));
    w.put_raw(t.data(), t.size() * sizeof(double));
  }
  const std::uint64_t sum = fnv1a(w.str());
  w.put(sum);
  write_file_atomic(path, w.str());
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const chem::Vocabulary* expected) {
  const std::string data = read_file(path);
  const std::size_t header = 4 + sizeof(std::uint32_t);
  if (data.size() < header || std::memcmp(data.data(), kMagic, 4) != 0) {
    throw Error(Errc::kCorruptFile, path.string() + " is not a checkpoint");
  }
  std::uint32_t version;
  std::memcpy(&version, data.data() + 4, sizeof version);
  if (version != kCheckpointVersion) {
    throw Error(Errc::kVersionMismatch, path.string() + ": checkpoint version " + std::to_string(version) +
                                            ", expected " + std::to_string(kCheckpointVersion));
  }
  if (data.size() < header + sizeof(std::uint64_t)) throw Error(Errc::kCorruptFile, path.string() + " is truncated");
  const std::size_t body = data.size() - sizeof(std::uint64_t);
  std::uint64_t stored;
  std::memcpy(&stored, data.data() + body, sizeof stored);
  if (fnv1a(std::string_view(data).substr(0, body)) != stored) {
    throw Error(Errc::kCorruptFile, path.string() + ": checksum mismatch (truncated or modified)");
  }

  Reader r(data, body);
  r.get<std::uint32_t>();  // magic
  r.get<std::uint32_t>();  // version
  const auto vocab_hash = r.get<std::uint64_t>();
  const auto vocab_size = r.get<std::uint32_t>();
  Checkpoint ck{gen::ModelParams{}, chem::Vocabulary::from_text(r.get_string()), {}};
  if (ck.vocab.hash() != vocab_hash || static_cast<std::uint32_t>(ck.vocab.size()) != vocab_size) {
    throw Error(Errc::kCorruptFile, path.string() + ": stored vocabulary does not match its hash");
  }
  if (expected && expected->hash() != vocab_hash) {
    throw Error(Errc::kVocabularyMismatch, path.string() + ": checkpoint vocabulary has " + std::to_string(vocab_size) +
                                               " tokens (hash " + hex64(vocab_hash) + "), expected " +
                                               std::to_string(expected->size()) + " (hash " + hex64(expected->hash()) + ")");
  }
  gen::ModelConfig& c = ck.params.config;
  for (int* v : {&c.vocab_size, &c.embed_dim, &c.hidden, &c.layers, &c.latent, &c.genes, &c.max_len}) *v = r.get<std::int32_t>();
  c.exp_hidden.assign(r.count(), 0);
  for (int& v : c.exp_hidden) v = r.get<std::int32_t>();
  c.dropout = r.get<double>();
  for (std::uint32_t n = r.count(); n > 0; --n) {
    std::string k = r.get_string();
    ck.meta[std::move(k)] = r.get_string();
  }
  for (std::uint32_t n = r.count(); n > 0; --n) {
    std::string name = r.get_string();
    const auto rows = r.get<std::uint32_t>();
    const auto cols = r.get<std::uint32_t>();
    if (rows > kMaxCount || cols > kMaxCount || std::uint64_t{rows} * cols > kMaxCount) {
      throw Error(Errc::kCorruptFile, path.string() + ": tensor '" + name + "' has an implausible shape");
    }
    nn::Tensor t(rows, cols);
    r.get_raw(t.data(), t.size() * sizeof(double));
    ck.params.tensors.emplace(std::move(name), std::move(t));
  }
  if (!r.done()) throw Error(Errc::kCorruptFile, path.string() + ": trailing bytes after the last section");
  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(Errc::kCorruptFile, path.string() + ": " + e.what());
  }
  return ck;
}

std::uint64_t params_hash(const gen::ModelParams& params) {
  std::uint64_t h = kFnvOffset;
  for (const auto& [name, t] : params.tensors) {
    h = fnv1a(name, h);
    const std::uint64_t shape[2] = {static_cast<std::uint64_t>(t.rows()), static_cast<std::uint64_t>(t.cols())};
    h = fnv1a_bytes(shape, sizeof shape, h);
    h = fnv1a_bytes(t.data(), t.size() * sizeof(double), h);
  }
  return h;
}

}  // namespace phenogen::io
