#pragma once

// Binary checkpoint layout (all integers little-endian):
//
//   "SAAMCKPT"            8 bytes
//   version               u32
//   config length         u64, then that many bytes of UTF-8 JSON
//   vocabulary hash       32 bytes (SHA-256 of the serialized vocabulary)
//   entry count           u64
//   per entry:
//     name length         u32, then the name bytes
//     rank                u32
//     dims                rank x u64
//     values              numel x f64 (IEEE-754 bits), row-major

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "saam/autodiff/tensor.hpp"
#include "saam/errors.hpp"
#include "saam/model/model.hpp"
#include "saam/text/vocabulary.hpp"

namespace saam {

constexpr std::string_view kCheckpointMagic = "SAAMCKPT";
constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public DataError {
 public:
  using DataError::DataError;
};
class CorruptCheckpointError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};
class CheckpointVersionError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};
class CheckpointHashError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

struct CheckpointEntry {
  std::string name;
  Shape shape;
  std::vector<double> values;
};

struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  nlohmann::ordered_json config;  // {"model": ..., "train": ...}
  Digest vocab_hash{};
  std::vector<CheckpointEntry> entries;

  ModelConfig model_config() const {
    if (!config.contains("model")) throw CorruptCheckpointError("checkpoint config has no model section");
    return ModelConfig::from_json(config.at("model"));
  }

  void verify_vocabulary(const Digest& expected) const {
    if (expected != vocab_hash) {
      throw CheckpointHashError("vocabulary hash mismatch: checkpoint " + digest_hex(vocab_hash) + ", data " +
                                digest_hex(expected));
    }
  }
};

namespace detail {

class ByteWriter {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void bytes(std::string_view s) { out_.append(s); }
  std::string take() { return std::move(out_); }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view in) : in_(in) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }
  std::string_view bytes(std::uint64_t n) {
    need(n);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::uint64_t n) const {
    if (n > in_.size() - pos_) {
      throw CorruptCheckpointError("corrupt checkpoint: truncated at byte " + std::to_string(pos_));
    }
  }
  std::uint64_t get(int n) {
    need(static_cast<std::uint64_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    pos_ += n;
    return v;
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string serialize_checkpoint(const Checkpoint& ckpt) {
  detail::ByteWriter w;
  w.bytes(kCheckpointMagic);
  w.u32(ckpt.version);
  const std::string blob = ckpt.config.dump();
  w.u64(blob.size());
  w.bytes(blob);
  w.bytes(std::string_view(reinterpret_cast<const char*>(ckpt.vocab_hash.data()), ckpt.vocab_hash.size()));
  w.u64(ckpt.entries.size());
  for (const auto& e : ckpt.entries) {
    w.u32(static_cast<std::uint32_t>(e.name.size()));
    w.bytes(e.name);
    w.u32(static_cast<std::uint32_t>(e.shape.size()));
    for (auto d : e.shape) w.u64(d);
    for (double v : e.values) w.f64(v);
  }
  return w.take();
}

inline Checkpoint parse_checkpoint(std::string_view bytes) {
  detail::ByteReader r(bytes);
  if (bytes.size() < kCheckpointMagic.size() || r.bytes(kCheckpointMagic.size()) != kCheckpointMagic) {
    throw CorruptCheckpointError("corrupt checkpoint: bad magic bytes");
  }
  Checkpoint c;
  c.version = r.u32();
  if (c.version != kCheckpointVersion) {
    throw CheckpointVersionError("checkpoint format version " + std::to_string(c.version) + " is not supported (expected " +
                                 std::to_string(kCheckpointVersion) + ")");
  }
  const std::uint64_t blob_len = r.u64();
  const auto blob = r.bytes(blob_len);
  try {
    c.config = nlohmann::ordered_json::parse(blob);
  } catch (const nlohmann::json::exception&) {
    throw CorruptCheckpointError("corrupt checkpoint: config blob is not valid JSON");
  }
  const auto hash = r.bytes(c.vocab_hash.size());
  std::memcpy(c.vocab_hash.data(), hash.data(), c.vocab_hash.size());
  const std::uint64_t count = r.u64();
  for (std::uint64_t k = 0; k < count; ++k) {
    CheckpointEntry e;
    e.name = std::string(r.bytes(r.u32()));
    const std::uint32_t rank = r.u32();
    std::uint64_t numel = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
      const std::uint64_t d = r.u64();
      if (d != 0 && numel > r.remaining() / d) throw CorruptCheckpointError("corrupt checkpoint: implausible shape for " + e.name);
      numel *= d;
      e.shape.push_back(static_cast<std::size_t>(d));
    }
    if (numel * 8 > r.remaining()) throw CorruptCheckpointError("corrupt checkpoint: truncated values for " + e.name);
    e.values.resize(numel);
    for (auto& v : e.values) v = r.f64();
    c.entries.push_back(std::move(e));
  }
  if (r.remaining() != 0) throw CorruptCheckpointError("corrupt checkpoint: trailing bytes");
  return c;
}

inline Checkpoint make_checkpoint(const SaamModel& model, const Digest& vocab_hash,
                                  const nlohmann::ordered_json& train_config = nullptr) {
  Checkpoint c;
  c.config["model"] = model.config().to_json();
  if (!train_config.is_null()) c.config["train"] = train_config;
  c.vocab_hash = vocab_hash;
  for (const auto& p : model.params().entries()) c.entries.push_back({p.name, p.tensor.shape(), p.tensor.values()});
  return c;
}

// Rebuilds a model whose parameters equal the stored values bit for bit.
inline SaamModel model_from_checkpoint(const Checkpoint& ckpt) {
  SaamModel model(ckpt.model_config(), 0);
  auto& store = model.params();
  if (store.size() != ckpt.entries.size()) {
    throw CorruptCheckpointError("checkpoint has " + std::to_string(ckpt.entries.size()) + " parameters, model expects " +
                                 std::to_string(store.size()));
  }
  for (const auto& e : ckpt.entries) {
    if (!store.contains(e.name)) throw CorruptCheckpointError("checkpoint parameter not in model: " + e.name);
    Tensor& t = store.get(e.name);
    if (t.shape() != e.shape) {
      throw CorruptCheckpointError("checkpoint parameter " + e.name + " has shape " + shape_str(e.shape) + ", model expects " +
                                   shape_str(t.shape()));
    }
    std::copy(e.values.begin(), e.values.end(), t.mutable_data().begin());
  }
  return model;
}

inline void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  const std::string bytes = serialize_checkpoint(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing checkpoint: " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read checkpoint: " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_checkpoint(bytes);
}

inline Checkpoint load_checkpoint(const std::string& path, const Digest& expected_vocab) {
  Checkpoint c = load_checkpoint(path);
  c.verify_vocabulary(expected_vocab);
  return c;
}

}  // namespace saam
