#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "saam/errors.hpp"
#include "saam/evaluation/evaluate.hpp"
#include "saam/model/model.hpp"
#include "saam/rng.hpp"
#include "saam/text/batch.hpp"
#include "saam/training/losses.hpp"
#include "saam/training/optimizer.hpp"

namespace saam {

constexpr double kDefaultClipNorm = 5.0;

struct TrainConfig {
  OptimizerConfig optimizer;
  std::size_t batch_size = 16;
  std::size_t max_epochs = 50;
  std::size_t patience = 5;
  std::uint64_t seed = 1;
  LossWeights weights;
  // Unset: clip at 5.0 for the GRU encoder only. A value <= 0 disables.
  std::optional<double> clip_norm;

  std::optional<double> effective_clip(EncoderKind kind) const {
    if (clip_norm) return *clip_norm > 0.0 ? clip_norm : std::nullopt;
    if (kind == EncoderKind::kGru) return kDefaultClipNorm;
    return std::nullopt;
  }

  void validate() const {
    if (!(optimizer.learning_rate >= 0.0) || !std::isfinite(optimizer.learning_rate)) {
      throw ConfigError("train.learning_rate must be finite and non-negative");
    }
    if (patience < 1) throw ConfigError("train.patience must be at least 1");
    if (batch_size < 1) throw ConfigError("train.batch_size must be at least 1");
    if (weights.overall < 0.0 || weights.aspect < 0.0) throw ConfigError("loss weights must be non-negative");
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["optimizer"] = to_string(optimizer.kind);
    j["learning_rate"] = optimizer.learning_rate;
    j["beta1"] = optimizer.beta1;
    j["beta2"] = optimizer.beta2;
    j["adam_epsilon"] = optimizer.epsilon;
    j["batch_size"] = batch_size;
    j["max_epochs"] = max_epochs;
    j["patience"] = patience;
    j["seed"] = seed;
    j["lambda_overall"] = weights.overall;
    j["lambda_aspect"] = weights.aspect;
    if (clip_norm) j["clip_norm"] = *clip_norm;
    else j["clip_norm"] = nullptr;
    return j;
  }

  static TrainConfig from_json(const nlohmann::ordered_json& j) {
    TrainConfig c;
    for (const auto& [key, value] : j.items()) {
      try {
        if (key == "optimizer") c.optimizer.kind = parse_optimizer_kind(value.get<std::string>());
        else if (key == "learning_rate") c.optimizer.learning_rate = value.get<double>();
        else if (key == "beta1") c.optimizer.beta1 = value.get<double>();
        else if (key == "beta2") c.optimizer.beta2 = value.get<double>();
        else if (key == "adam_epsilon") c.optimizer.epsilon = value.get<double>();
        else if (key == "batch_size") c.batch_size = value.get<std::size_t>();
        else if (key == "max_epochs") c.max_epochs = value.get<std::size_t>();
        else if (key == "patience") c.patience = value.get<std::size_t>();
        else if (key == "seed") c.seed = value.get<std::uint64_t>();
        else if (key == "lambda_overall") c.weights.overall = value.get<double>();
        else if (key == "lambda_aspect") c.weights.aspect = value.get<double>();
        else if (key == "clip_norm") c.clip_norm = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
        else throw ConfigError("unknown config key: train." + key);
      } catch (const nlohmann::json::exception&) {
        throw ConfigError("invalid value for config key: train." + key);
      }
    }
    c.validate();
    return c;
  }
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_loss = 0.0;
  // Aspect-average MSE (regression) or accuracy (classification) on dev.
  double dev_metric = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;  // 0: initial parameters were never beaten
  double best_dev_loss = std::numeric_limits<double>::infinity();
  bool early_stopped = false;
};

inline nlohmann::ordered_json history_json(const TrainResult& r) {
  nlohmann::ordered_json j;
  j["best_epoch"] = r.best_epoch;
  j["best_dev_loss"] = r.best_dev_loss;
  j["early_stopped"] = r.early_stopped;
  auto& epochs = j["epochs"] = nlohmann::ordered_json::array();
  for (const auto& e : r.history) {
    epochs.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"dev_loss", e.dev_loss}, {"dev_metric", e.dev_metric}});
  }
  return j;
}

using EpochCallback = std::function<void(const EpochRecord&)>;

inline void check_finite_parameters(const ParameterStore& store, std::size_t epoch, std::size_t batch) {
  for (const auto& e : store.entries())
    for (double v : e.tensor.data())
      if (!std::isfinite(v)) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch) +
                           ": parameter " + e.name + " is not finite");
      }
}

// Mini-batch training with dev-loss early stopping. Each document is its own
// graph; gradients of loss/B accumulate in document order, then one optimizer
// step per batch. The model ends holding the best-dev parameters.
inline TrainResult train(SaamModel& model, const std::vector<ReviewDocument>& train_docs,
                         const std::vector<ReviewDocument>& dev_docs, const TrainConfig& config,
                         const EpochCallback& on_epoch = {}) {
  config.validate();
  if (train_docs.empty()) throw DataError("training set is empty");
  const ModelConfig& mc = model.config();
  const PaddedBatch batch = make_batch(train_docs, mc.s_max, mc.t_max);
  std::vector<RatingTargets> targets;
  for (const auto& d : train_docs) targets.push_back(RatingTargets::of(d));

  ParameterStore& params = model.params();
  Optimizer optimizer(config.optimizer);
  Rng order_rng(config.seed);
  Rng dropout_rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
  const DropoutContext dropout{&dropout_rng, mc.encoder.dropout};
  const auto clip = config.effective_clip(mc.encoder.kind);

  auto dev_eval = [&](double fallback_loss) {
    if (dev_docs.empty()) return std::pair<double, double>{fallback_loss, 0.0};
    const auto ev = evaluate_model(model, dev_docs, false, config.weights);
    const double metric = mc.task() == Task::kClassification ? ev.report.avg_accuracy.value_or(0.0) : ev.report.avg_mse;
    return std::pair<double, double>{ev.mean_loss, metric};
  };

  TrainResult result;
  std::vector<std::size_t> order(train_docs.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<double>> best = params.snapshot();
  if (!dev_docs.empty()) result.best_dev_loss = dev_eval(0.0).first;
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    order_rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double inv = 1.0 / static_cast<double>(end - start);
      params.zero_grad();
      try {
        for (std::size_t k = start; k < end; ++k) {
          const std::size_t b = order[k];
          Graph g;
          const ModelOutput out = model.forward(g, batch.document(b), dropout);
          const Tensor loss = head_loss(g, out.head, targets[b], config.weights);
          epoch_loss += loss.item();
          g.backward(ops::scale(g, loss, inv));
        }
      } catch (const NumericError& e) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index) + ": " + e.what());
      }
      if (clip) clip_gradients(params, *clip);
      optimizer.step(params);
      check_finite_parameters(params, epoch, batch_index);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / static_cast<double>(order.size());
    std::tie(rec.dev_loss, rec.dev_metric) = dev_eval(rec.train_loss);
    if (!std::isfinite(rec.dev_loss)) {
      throw NumericError("training diverged at epoch " + std::to_string(epoch) + ": dev loss is not finite");
    }
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);

    if (rec.dev_loss < result.best_dev_loss) {
      result.best_dev_loss = rec.dev_loss;
      result.best_epoch = epoch;
      best = params.snapshot();
      since_best = 0;
    } else if (++since_best >= config.patience) {
      result.early_stopped = true;
      break;
    }
  }
  params.restore(best);
  return result;
}

}  // namespace saam
