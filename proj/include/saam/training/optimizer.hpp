#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "saam/autodiff/parameters.hpp"
#include "saam/errors.hpp"

namespace saam {

enum class OptimizerKind { kSgd, kAdam };

inline std::string to_string(OptimizerKind k) { return k == OptimizerKind::kSgd ? "sgd" : "adam"; }

inline OptimizerKind parse_optimizer_kind(const std::string& s) {
  if (s == "sgd") return OptimizerKind::kSgd;
  if (s == "adam") return OptimizerKind::kAdam;
  throw ConfigError("unknown optimizer: " + s);
}

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Global L2 norm over all parameter gradients.
inline double gradient_norm(const ParameterStore& store) {
  double sq = 0.0;
  for (const auto& e : store.entries()) {
    if (!e.tensor.has_grad()) continue;
    for (double v : e.tensor.grad()) sq += v * v;
  }
  return std::sqrt(sq);
}

// Rescales gradients so the global norm is at most max_norm. Returns the
// norm before clipping.
inline double clip_gradients(ParameterStore& store, double max_norm) {
  const double norm = gradient_norm(store);
  if (norm > max_norm && norm > 0.0) {
    const double f = max_norm / norm;
    for (auto& e : store.entries()) {
      if (!e.tensor.has_grad()) continue;
      for (double& v : e.tensor.mutable_grad()) v *= f;
    }
  }
  return norm;
}

class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config) : config_(config) {
    if (!(config_.learning_rate >= 0.0) || !std::isfinite(config_.learning_rate)) {
      throw ConfigError("learning rate must be finite and non-negative");
    }
  }

  const OptimizerConfig& config() const { return config_; }
  std::size_t steps() const { return t_; }

  // Parameters without a gradient buffer are left untouched.
  void step(ParameterStore& store) {
    auto& entries = store.entries();
    if (config_.kind == OptimizerKind::kAdam && m_.empty()) {
      for (const auto& e : entries) {
        m_.emplace_back(e.tensor.numel(), 0.0);
        v_.emplace_back(e.tensor.numel(), 0.0);
      }
    }
    ++t_;
    const double lr = config_.learning_rate;
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < entries.size(); ++k) {
      Tensor& p = entries[k].tensor;
      if (!p.has_grad()) continue;
      auto w = p.mutable_data();
      auto g = p.grad();
      if (config_.kind == OptimizerKind::kSgd) {
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * g[i];
        continue;
      }
      auto& m = m_[k];
      auto& v = v_[k];
      for (std::size_t i = 0; i < w.size(); ++i) {
        m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
        v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
        w[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + config_.epsilon);
      }
    }
  }

 private:
  OptimizerConfig config_;
  std::size_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace saam
