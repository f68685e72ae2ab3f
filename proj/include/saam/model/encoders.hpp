#pragma once

// Sentence encoders producing the per-sentence feature matrix u (S_max x d).
//
//   cnn  : convolution over token windows, relu, max over time, one block of
//          filters per window width, concatenated.
//   gru  : GRU over the real tokens; the hidden state after the last real
//          token is the sentence vector.
//   mean : average of token embeddings (fast encoder for tests).
//
// Padded token positions are never fed to any encoder, so appending pads
// cannot change an output.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "saam/autodiff/ops.hpp"
#include "saam/autodiff/parameters.hpp"
#include "saam/errors.hpp"
#include "saam/rng.hpp"
#include "saam/text/batch.hpp"

namespace saam {

enum class EncoderKind { kCnn, kGru, kMean };

inline std::string to_string(EncoderKind k) {
  switch (k) {
    case EncoderKind::kCnn: return "cnn";
    case EncoderKind::kGru: return "gru";
    case EncoderKind::kMean: return "mean";
  }
  return "?";
}

inline EncoderKind parse_encoder_kind(const std::string& s) {
  if (s == "cnn") return EncoderKind::kCnn;
  if (s == "gru") return EncoderKind::kGru;
  if (s == "mean") return EncoderKind::kMean;
  throw ConfigError("unknown encoder kind: " + s);
}

struct EncoderConfig {
  EncoderKind kind = EncoderKind::kMean;
  std::size_t embedding_dim = 16;
  std::vector<std::size_t> filter_widths{3, 4, 5};
  std::size_t filters_per_width = 100;
  std::size_t hidden_size = 300;  // gru only
  double dropout = 0.0;           // applied to sentence vectors while training

  std::size_t feature_dim() const {
    switch (kind) {
      case EncoderKind::kCnn: return filter_widths.size() * filters_per_width;
      case EncoderKind::kGru: return hidden_size;
      case EncoderKind::kMean: return embedding_dim;
    }
    return 0;
  }

  void validate() const {
    if (embedding_dim == 0) throw ConfigError("encoder.embedding_dim must be positive");
    if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("encoder.dropout must be in [0, 1)");
    if (kind == EncoderKind::kCnn) {
      if (filter_widths.empty() || filters_per_width == 0) throw ConfigError("cnn encoder needs filter widths and filters");
      for (auto w : filter_widths)
        if (w == 0) throw ConfigError("cnn filter widths must be positive");
    }
    if (kind == EncoderKind::kGru && hidden_size == 0) throw ConfigError("encoder.hidden_size must be positive");
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = to_string(kind);
    j["embedding_dim"] = embedding_dim;
    j["filter_widths"] = filter_widths;
    j["filters_per_width"] = filters_per_width;
    j["hidden_size"] = hidden_size;
    j["dropout"] = dropout;
    return j;
  }

  static EncoderConfig from_json(const nlohmann::ordered_json& j) {
    EncoderConfig c;
    for (const auto& [key, value] : j.items()) {
      try {
        if (key == "kind") c.kind = parse_encoder_kind(value.get<std::string>());
        else if (key == "embedding_dim") c.embedding_dim = value.get<std::size_t>();
        else if (key == "filter_widths") c.filter_widths = value.get<std::vector<std::size_t>>();
        else if (key == "filters_per_width") c.filters_per_width = value.get<std::size_t>();
        else if (key == "hidden_size") c.hidden_size = value.get<std::size_t>();
        else if (key == "dropout") c.dropout = value.get<double>();
        else throw ConfigError("unknown config key: encoder." + key);
      } catch (const nlohmann::json::exception&) {
        throw ConfigError("invalid value for config key: encoder." + key);
      }
    }
    c.validate();
    return c;
  }
};

// Rows of `values` whose mask is 0 are all-zero.
struct SentenceEmbeddingMatrix {
  Tensor values;  // [rows, d]
  std::vector<std::uint8_t> mask;

  std::size_t rows() const { return mask.size(); }
  std::size_t real_count() const {
    std::size_t n = 0;
    for (auto m : mask) n += m;
    return n;
  }
};

// Active only while training with dropout > 0.
struct DropoutContext {
  Rng* rng = nullptr;
  double rate = 0.0;
};

class SentenceEncoder {
 public:
  SentenceEncoder() = default;

  SentenceEncoder(const EncoderConfig& config, std::size_t vocab_size, ParameterStore& store, Rng& rng)
      : config_(config) {
    config_.validate();
    const std::size_t e = config_.embedding_dim;
    embedding_ = store.add_glorot("encoder.embedding", {vocab_size, e}, 1, e, rng);
    switch (config_.kind) {
      case EncoderKind::kCnn:
        for (std::size_t w : config_.filter_widths) {
          const std::string p = "encoder.conv" + std::to_string(w);
          conv_w_.push_back(store.add_glorot(p + ".weight", {w * e, config_.filters_per_width}, w * e,
                                             config_.filters_per_width, rng));
          conv_b_.push_back(store.add_zeros(p + ".bias", {config_.filters_per_width}));
        }
        break;
      case EncoderKind::kGru: {
        const std::size_t h = config_.hidden_size;
        for (const char* gate : {"update", "reset", "candidate"}) {
          const std::string p = std::string("encoder.gru.") + gate;
          gru_w_.push_back(store.add_glorot(p + ".input_weight", {e, h}, e, h, rng));
          gru_u_.push_back(store.add_glorot(p + ".hidden_weight", {h, h}, h, h, rng));
          gru_b_.push_back(store.add_zeros(p + ".bias", {h}));
        }
        break;
      }
      case EncoderKind::kMean:
        break;
    }
  }

  const EncoderConfig& config() const { return config_; }
  std::size_t feature_dim() const { return config_.feature_dim(); }

  // One sentence slot -> [d]. Only positions with token_mask = 1 are read.
  Tensor encode(Graph& g, std::span<const int> ids, std::span<const std::uint8_t> token_mask) const {
    std::vector<int> real;
    for (std::size_t t = 0; t < ids.size(); ++t)
      if (token_mask.empty() || token_mask[t]) real.push_back(ids[t]);
    if (real.empty()) return Tensor::zeros({feature_dim()});
    switch (config_.kind) {
      case EncoderKind::kCnn: return encode_cnn(g, real);
      case EncoderKind::kGru: return encode_gru(g, real);
      case EncoderKind::kMean: return encode_mean(g, real);
    }
    return {};
  }

  Tensor encode_mean(Graph& g, std::span<const int> ids) const {
    if (ids.empty()) return Tensor::zeros({feature_dim()});
    return ops::mean(g, ops::embedding_lookup(g, embedding_, ids), 0);
  }

  Tensor encode_cnn(Graph& g, std::span<const int> ids) const {
    if (ids.empty()) return Tensor::zeros({feature_dim()});
    Tensor embedded = ops::embedding_lookup(g, embedding_, ids);
    std::vector<Tensor> pooled;
    for (std::size_t k = 0; k < conv_w_.size(); ++k) {
      Tensor windows = ops::unfold(g, embedded, config_.filter_widths[k]);
      Tensor act = ops::relu(g, ops::affine(g, windows, conv_w_[k], conv_b_[k]));
      pooled.push_back(ops::max_over_axis(g, act, 0));
    }
    return pooled.size() == 1 ? pooled.front() : ops::concat(g, pooled);
  }

  Tensor encode_gru(Graph& g, std::span<const int> ids) const {
    if (ids.empty()) return Tensor::zeros({feature_dim()});
    Tensor embedded = ops::embedding_lookup(g, embedding_, ids);
    // Input projections for all tokens at once, per gate.
    const Tensor xz = ops::affine(g, embedded, gru_w_[0], gru_b_[0]);
    const Tensor xr = ops::affine(g, embedded, gru_w_[1], gru_b_[1]);
    const Tensor xn = ops::affine(g, embedded, gru_w_[2], gru_b_[2]);
    Tensor h = Tensor::zeros({config_.hidden_size});
    const Tensor no_bias;
    for (std::size_t t = 0; t < ids.size(); ++t) {
      Tensor z = ops::sigmoid(g, ops::add(g, ops::row(g, xz, t), ops::affine(g, h, gru_u_[0], no_bias)));
      Tensor r = ops::sigmoid(g, ops::add(g, ops::row(g, xr, t), ops::affine(g, h, gru_u_[1], no_bias)));
      Tensor n = ops::tanh(g, ops::add(g, ops::row(g, xn, t), ops::affine(g, ops::mul(g, r, h), gru_u_[2], no_bias)));
      // h' = (1 - z) * h + z * n
      h = ops::add(g, h, ops::mul(g, z, ops::sub(g, n, h)));
    }
    return h;
  }

  SentenceEmbeddingMatrix encode_document(Graph& g, const DocumentSlots& doc, DropoutContext dropout = {}) const {
    SentenceEmbeddingMatrix u;
    u.mask.assign(doc.sentence_mask.begin(), doc.sentence_mask.end());
    std::vector<Tensor> rows;
    rows.reserve(doc.s_max);
    for (std::size_t s = 0; s < doc.s_max; ++s) {
      if (!doc.sentence_mask[s]) {
        rows.push_back(Tensor::zeros({feature_dim()}));
        continue;
      }
      Tensor t = encode(g, doc.sentence_ids(s), doc.sentence_token_mask(s));
      if (dropout.rng && dropout.rate > 0.0) {
        std::vector<double> keep(t.numel());
        for (double& k : keep) k = dropout.rng->uniform() < dropout.rate ? 0.0 : 1.0 / (1.0 - dropout.rate);
        t = ops::mask_multiply(g, t, std::move(keep));
      }
      rows.push_back(std::move(t));
    }
    u.values = ops::stack_rows(g, rows);
    return u;
  }

 private:
  EncoderConfig config_;
  Tensor embedding_;
  std::vector<Tensor> conv_w_, conv_b_;
  std::vector<Tensor> gru_w_, gru_u_, gru_b_;
};

}  // namespace saam
