#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "saam/autodiff/parameters.hpp"
#include "saam/model/encoders.hpp"
#include "saam/model/heads.hpp"
#include "saam/model/predictions.hpp"
#include "saam/rng.hpp"
#include "saam/text/batch.hpp"
#include "saam/text/document.hpp"

namespace saam {

struct ModelConfig {
  Variant variant = Variant::kR;
  EncoderConfig encoder;
  AspectSet aspects{std::vector<std::string>{"Aspect1"}};
  std::size_t num_classes = 5;
  std::size_t s_max = 8;
  std::size_t t_max = 32;
  double epsilon = 1e-8;
  MaskMode mask_mode = MaskMode::kHard;
  std::size_t vocab_size = 2;

  Task task() const { return task_of(variant); }

  HeadConfig head_config() const {
    HeadConfig h;
    h.variant = variant;
    h.num_aspects = aspects.size();
    h.num_classes = num_classes;
    h.s_max = s_max;
    h.feature_dim = encoder.feature_dim();
    h.epsilon = epsilon;
    h.mask_mode = mask_mode;
    return h;
  }

  void validate() const {
    encoder.validate();
    head_config().validate();
    if (t_max == 0) throw ConfigError("t_max must be positive");
    if (vocab_size < 2) throw ConfigError("vocab_size must include the reserved ids");
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["variant"] = to_string(variant);
    j["encoder"] = encoder.to_json();
    j["aspects"] = aspects.names();
    j["num_classes"] = num_classes;
    j["s_max"] = s_max;
    j["t_max"] = t_max;
    j["epsilon"] = epsilon;
    j["attribution_mask_mode"] = to_string(mask_mode);
    j["vocab_size"] = vocab_size;
    return j;
  }

  static ModelConfig from_json(const nlohmann::ordered_json& j) {
    ModelConfig c;
    for (const auto& [key, value] : j.items()) {
      try {
        if (key == "variant") c.variant = parse_variant(value.get<std::string>());
        else if (key == "encoder") c.encoder = EncoderConfig::from_json(value);
        else if (key == "aspects") c.aspects = AspectSet(value.get<std::vector<std::string>>());
        else if (key == "num_classes") c.num_classes = value.get<std::size_t>();
        else if (key == "s_max") c.s_max = value.get<std::size_t>();
        else if (key == "t_max") c.t_max = value.get<std::size_t>();
        else if (key == "epsilon") c.epsilon = value.get<double>();
        else if (key == "attribution_mask_mode") c.mask_mode = parse_mask_mode(value.get<std::string>());
        else if (key == "vocab_size") c.vocab_size = value.get<std::size_t>();
        else throw ConfigError("unknown config key: " + key);
      } catch (const nlohmann::json::exception&) {
        throw ConfigError("invalid value for config key: " + key);
      }
    }
    c.validate();
    return c;
  }
};

struct ModelOutput {
  SentenceEmbeddingMatrix u;
  HeadOutput head;
};

// Encoder + head over a single ParameterStore. Parameter tensors are shared
// handles, so the model is move-only.
class SaamModel {
 public:
  SaamModel(ModelConfig config, std::uint64_t seed) : config_(std::move(config)) {
    config_.validate();
    Rng rng(seed);
    encoder_ = SentenceEncoder(config_.encoder, config_.vocab_size, params_, rng);
    head_ = init_head(config_.head_config(), params_, rng);
  }

  SaamModel(const SaamModel&) = delete;
  SaamModel& operator=(const SaamModel&) = delete;
  SaamModel(SaamModel&&) = default;
  SaamModel& operator=(SaamModel&&) = default;

  const ModelConfig& config() const { return config_; }
  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }
  const SentenceEncoder& encoder() const { return encoder_; }
  const HeadParams& head_params() const { return head_; }

  ModelOutput forward(Graph& g, const DocumentSlots& doc, DropoutContext dropout = {}) const {
    ModelOutput out;
    out.u = encoder_.encode_document(g, doc, dropout);
    out.head = head_forward(g, config_.head_config(), head_, out.u);
    return out;
  }

  PredictionSet predict(const DocumentSlots& doc) const {
    Graph g;
    return to_predictions(forward(g, doc).head);
  }

  struct Inference {
    PredictionSet predictions;
    AttributionResult attribution;
  };

  Inference infer(const DocumentSlots& doc) const {
    Graph g;
    auto out = forward(g, doc);
    return {to_predictions(out.head), to_attribution(out.head, config_.aspects.size())};
  }

 private:
  ModelConfig config_;
  ParameterStore params_;
  SentenceEncoder encoder_;
  HeadParams head_;
};

}  // namespace saam
