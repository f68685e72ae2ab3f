#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "saam/autodiff/ops.hpp"
#include "saam/errors.hpp"
#include "saam/model/heads.hpp"
#include "saam/model/predictions.hpp"
#include "saam/text/document.hpp"

namespace saam {

struct LossWeights {
  double overall = 1.0;
  double aspect = 1.0;
};

struct RatingTargets {
  double overall = 0.0;
  std::vector<double> aspects;

  static RatingTargets of(const ReviewDocument& doc) { return {doc.overall_rating, doc.aspect_ratings}; }
};

// Rating r in {1..num_classes} -> class index r-1.
inline std::size_t rating_to_class(double rating, std::size_t num_classes) {
  const double r = std::round(rating);
  if (!std::isfinite(rating) || r != rating || r < 1.0 || r > static_cast<double>(num_classes)) {
    throw DataError("rating " + std::to_string(rating) + " outside the class domain 1.." + std::to_string(num_classes));
  }
  return static_cast<std::size_t>(r) - 1;
}

namespace detail {

inline void check_target_count(std::size_t got, std::size_t expected) {
  if (got != expected) {
    throw DimensionError("expected " + std::to_string(expected) + " aspect targets, got " + std::to_string(got));
  }
}

}  // namespace detail

// Differentiable loss over one document's head output.
inline Tensor head_loss(Graph& g, const HeadOutput& out, const RatingTargets& y, const LossWeights& w = {}) {
  detail::check_target_count(y.aspects.size(), out.aspects.size());
  if (out.task == Task::kClassification) {
    const std::size_t classes = out.overall.numel();
    Tensor total = ops::scale(g, ops::cross_entropy(g, out.overall, rating_to_class(y.overall, classes)), w.overall);
    for (std::size_t j = 0; j < out.aspects.size(); ++j) {
      Tensor ce = ops::cross_entropy(g, out.aspects[j], rating_to_class(y.aspects[j], classes));
      total = ops::add(g, total, ops::scale(g, ce, w.aspect));
    }
    return total;
  }
  Tensor total = ops::scale(g, ops::squared_error(g, out.overall, y.overall), w.overall);
  for (std::size_t j = 0; j < out.aspects.size(); ++j) {
    total = ops::add(g, total, ops::scale(g, ops::squared_error(g, out.aspects[j], y.aspects[j]), w.aspect));
  }
  return total;
}

// Value-level losses over materialized predictions.
inline double classification_loss(const PredictionSet& preds, const RatingTargets& y, const LossWeights& w = {}) {
  if (preds.task != Task::kClassification) throw ConfigError("classification_loss on a regression prediction");
  detail::check_target_count(y.aspects.size(), preds.aspects.size());
  auto ce = [](const std::vector<double>& dist, std::size_t k) {
    return -std::log(std::max(dist.at(k), ops::kLogClamp));
  };
  const std::size_t classes = preds.overall.size();
  double loss = w.overall * ce(preds.overall, rating_to_class(y.overall, classes));
  for (std::size_t j = 0; j < preds.aspects.size(); ++j) {
    loss += w.aspect * ce(preds.aspects[j], rating_to_class(y.aspects[j], classes));
  }
  return loss;
}

inline double regression_loss(const PredictionSet& preds, const RatingTargets& y, const LossWeights& w = {}) {
  if (preds.task != Task::kRegression) throw ConfigError("regression_loss on a classification prediction");
  detail::check_target_count(y.aspects.size(), preds.aspects.size());
  const double d0 = preds.overall.at(0) - y.overall;
  double loss = w.overall * d0 * d0;
  for (std::size_t j = 0; j < preds.aspects.size(); ++j) {
    const double d = preds.aspects[j].at(0) - y.aspects[j];
    loss += w.aspect * d * d;
  }
  return loss;
}

inline double prediction_loss(const PredictionSet& preds, const RatingTargets& y, const LossWeights& w = {}) {
  return preds.task == Task::kClassification ? classification_loss(preds, y, w) : regression_loss(preds, y, w);
}

}  // namespace saam
