#pragma once

// Sentiment-aspect attribution heads.
//
// Every real sentence vector t_i gets a rating score (|C| class scores or one
// scalar) and an aspect attribution distribution (softmax over |A|+1 slots,
// |A|+2 for C2; the last slot is "other"). Document-level aspect outputs pool
// the attribution-scaled scores over sentences:
//
//   C1  overall = softmax(W^o . flatten(u) + b^o)
//       aspect j = softmax(sum_i aspect(s_i)[j] * score(s_i))
//   C2  as C1 but overall uses attribution slot |A|+1 instead of W^o
//   R   overall = (<W^o, u> + b^o) / |s|
//       aspect j = sum_i aspect(s_i)[j] score(s_i) / (sum_i aspect(s_i)[j] + eps)
//
// Flat heads (E-CNN style baseline) map flatten(u) straight to every target.

#include <cstddef>
#include <string>
#include <vector>

#include "saam/autodiff/ops.hpp"
#include "saam/autodiff/parameters.hpp"
#include "saam/errors.hpp"
#include "saam/model/encoders.hpp"
#include "saam/rng.hpp"

namespace saam {

enum class Variant { kC1, kC2, kR, kFlatC, kFlatR };
enum class Task { kClassification, kRegression };
enum class MaskMode { kHard, kSoft };

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::kC1: return "C1";
    case Variant::kC2: return "C2";
    case Variant::kR: return "R";
    case Variant::kFlatC: return "flat-C";
    case Variant::kFlatR: return "flat-R";
  }
  return "?";
}

inline Variant parse_variant(const std::string& s) {
  if (s == "C1" || s == "c1") return Variant::kC1;
  if (s == "C2" || s == "c2") return Variant::kC2;
  if (s == "R" || s == "r") return Variant::kR;
  if (s == "flat-C" || s == "flat-c") return Variant::kFlatC;
  if (s == "flat-R" || s == "flat-r") return Variant::kFlatR;
  throw ConfigError("unknown variant: " + s);
}

inline Task task_of(Variant v) {
  return (v == Variant::kR || v == Variant::kFlatR) ? Task::kRegression : Task::kClassification;
}

inline bool has_attribution(Variant v) { return v == Variant::kC1 || v == Variant::kC2 || v == Variant::kR; }

inline std::string to_string(MaskMode m) { return m == MaskMode::kHard ? "hard" : "soft"; }

inline MaskMode parse_mask_mode(const std::string& s) {
  if (s == "hard") return MaskMode::kHard;
  if (s == "soft") return MaskMode::kSoft;
  throw ConfigError("unknown attribution_mask_mode: " + s);
}

struct HeadConfig {
  Variant variant = Variant::kR;
  std::size_t num_aspects = 1;
  std::size_t num_classes = 5;
  std::size_t s_max = 8;
  std::size_t feature_dim = 16;
  double epsilon = 1e-8;
  MaskMode mask_mode = MaskMode::kHard;

  Task task() const { return task_of(variant); }

  // Attribution slots per sentence: |A|+1, or |A|+2 for C2.
  std::size_t attribution_slots() const { return num_aspects + (variant == Variant::kC2 ? 2 : 1); }

  void validate() const {
    if (num_aspects < 1) throw ConfigError("head needs at least one aspect");
    if (task() == Task::kClassification && num_classes < 2) throw ConfigError("classification needs at least 2 classes");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (s_max == 0 || feature_dim == 0) throw ConfigError("head needs positive S_max and d");
  }
};

struct HeadParams {
  Tensor overall_weight, overall_bias;      // C1: [S*d, C]  R: [S, d]  flat: [S*d, (|A|+1)*out]
  Tensor score_weight, score_bias;          // [d, C] or [d, 1]
  Tensor attribution_weight, attribution_bias;  // [d, slots]
};

inline HeadParams init_head(const HeadConfig& cfg, ParameterStore& store, Rng& rng) {
  cfg.validate();
  HeadParams p;
  const std::size_t d = cfg.feature_dim, s = cfg.s_max, c = cfg.num_classes;
  switch (cfg.variant) {
    case Variant::kC1:
      p.overall_weight = store.add_glorot("head.overall.weight", {s * d, c}, s * d, c, rng);
      p.overall_bias = store.add_zeros("head.overall.bias", {c});
      [[fallthrough]];
    case Variant::kC2:
      p.score_weight = store.add_glorot("head.score.weight", {d, c}, d, c, rng);
      p.score_bias = store.add_zeros("head.score.bias", {c});
      p.attribution_weight = store.add_glorot("head.attribution.weight", {d, cfg.attribution_slots()}, d,
                                              cfg.attribution_slots(), rng);
      p.attribution_bias = store.add_zeros("head.attribution.bias", {cfg.attribution_slots()});
      break;
    case Variant::kR:
      p.overall_weight = store.add_glorot("head.overall.weight", {s, d}, s * d, 1, rng);
      p.overall_bias = store.add_zeros("head.overall.bias", {1});
      p.score_weight = store.add_glorot("head.score.weight", {d, 1}, d, 1, rng);
      p.score_bias = store.add_zeros("head.score.bias", {1});
      p.attribution_weight = store.add_glorot("head.attribution.weight", {d, cfg.attribution_slots()}, d,
                                              cfg.attribution_slots(), rng);
      p.attribution_bias = store.add_zeros("head.attribution.bias", {cfg.attribution_slots()});
      break;
    case Variant::kFlatC:
    case Variant::kFlatR: {
      const std::size_t out = (cfg.num_aspects + 1) * (cfg.variant == Variant::kFlatC ? c : 1);
      p.overall_weight = store.add_glorot("head.flat.weight", {s * d, out}, s * d, out, rng);
      p.overall_bias = store.add_zeros("head.flat.bias", {out});
      break;
    }
  }
  return p;
}

// Graph-level outputs of one head evaluation. `overall` is a [|C|]
// distribution or a scalar; `aspects` has |A| entries of the same kind.
// Per-sentence tensors are aligned with `slots` (the sentence positions
// that took part in the pooling).
struct HeadOutput {
  Task task = Task::kRegression;
  Variant variant = Variant::kR;
  Tensor overall;
  std::vector<Tensor> aspects;
  std::vector<std::size_t> slots;
  std::vector<Tensor> aspect_dist;
  std::vector<Tensor> scores;
  std::vector<Tensor> scaled_scores;
  std::vector<double> attribution_mass;  // R: sum_i aspect(s_i)[j] per aspect
};

namespace detail {

// Sentence slots entering the pooled sums, with their vectors.
inline std::vector<std::pair<std::size_t, Tensor>> pooled_rows(Graph& g, const HeadConfig& cfg,
                                                               const SentenceEmbeddingMatrix& u) {
  const Tensor& values = u.values;
  if (values.rank() != 2 || values.dim(1) != cfg.feature_dim || values.dim(0) != u.rows()) {
    throw DimensionError("head: embedding matrix " + shape_str(values.shape()) + " does not match d=" +
                         std::to_string(cfg.feature_dim) + " with " + std::to_string(u.rows()) + " mask entries");
  }
  if (u.rows() > cfg.s_max) {
    throw DimensionError("head: " + std::to_string(u.rows()) + " sentence rows exceed S_max=" + std::to_string(cfg.s_max));
  }
  if (u.real_count() == 0) throw DimensionError("head: document has no real sentences");
  std::vector<std::pair<std::size_t, Tensor>> rows;
  if (cfg.mask_mode == MaskMode::kHard) {
    for (std::size_t i = 0; i < u.rows(); ++i)
      if (u.mask[i]) rows.emplace_back(i, ops::row(g, values, i));
  } else {
    for (std::size_t i = 0; i < cfg.s_max; ++i) {
      rows.emplace_back(i, i < u.rows() && u.mask[i] ? ops::row(g, values, i) : Tensor::zeros({cfg.feature_dim}));
    }
  }
  return rows;
}

inline Tensor accumulate(Graph& g, const Tensor& total, const Tensor& term) {
  return total.defined() ? ops::add(g, total, term) : term;
}

// sum over rows of t_i . W[i*d:(i+1)*d, :] (+ bias), i.e. the flattened
// matrix u times W restricted to the pooled rows.
inline Tensor flattened_linear(Graph& g, const std::vector<std::pair<std::size_t, Tensor>>& rows,
                               const Tensor& weight, const Tensor& bias, std::size_t d) {
  Tensor total;
  const Tensor no_bias;
  for (const auto& [i, t] : rows) {
    total = accumulate(g, total, ops::affine(g, t, ops::slice(g, weight, i * d, (i + 1) * d), no_bias));
  }
  return ops::add(g, total, bias);
}

inline HeadOutput classification_head(Graph& g, const HeadConfig& cfg, const HeadParams& p,
                                      const SentenceEmbeddingMatrix& u) {
  const auto rows = pooled_rows(g, cfg, u);
  HeadOutput out;
  out.task = Task::kClassification;
  out.variant = cfg.variant;
  Tensor total;
  for (const auto& [i, t] : rows) {
    Tensor score = ops::affine(g, t, p.score_weight, p.score_bias);
    Tensor aspect = ops::softmax_lastdim(g, ops::affine(g, t, p.attribution_weight, p.attribution_bias));
    Tensor scaled = ops::outer(g, aspect, score);
    total = accumulate(g, total, scaled);
    out.slots.push_back(i);
    out.scores.push_back(score);
    out.aspect_dist.push_back(aspect);
    out.scaled_scores.push_back(scaled);
  }
  Tensor dists = ops::softmax_lastdim(g, total);  // one distribution per attribution slot
  for (std::size_t j = 0; j < cfg.num_aspects; ++j) out.aspects.push_back(ops::row(g, dists, j));
  if (cfg.variant == Variant::kC1) {
    out.overall = ops::softmax_lastdim(g, flattened_linear(g, rows, p.overall_weight, p.overall_bias, cfg.feature_dim));
  } else {
    out.overall = ops::row(g, dists, cfg.num_aspects);
  }
  return out;
}

}  // namespace detail

inline HeadOutput head_c1_forward(Graph& g, const HeadConfig& cfg, const HeadParams& p,
                                  const SentenceEmbeddingMatrix& u) {
  if (cfg.variant != Variant::kC1) throw ConfigError("head_c1_forward called with variant " + to_string(cfg.variant));
  return detail::classification_head(g, cfg, p, u);
}

inline HeadOutput head_c2_forward(Graph& g, const HeadConfig& cfg, const HeadParams& p,
                                  const SentenceEmbeddingMatrix& u) {
  if (cfg.variant != Variant::kC2) throw ConfigError("head_c2_forward called with variant " + to_string(cfg.variant));
  return detail::classification_head(g, cfg, p, u);
}

inline HeadOutput head_r_forward(Graph& g, const HeadConfig& cfg, const HeadParams& p,
                                 const SentenceEmbeddingMatrix& u) {
  if (cfg.variant != Variant::kR) throw ConfigError("head_r_forward called with variant " + to_string(cfg.variant));
  const auto rows = detail::pooled_rows(g, cfg, u);
  HeadOutput out;
  out.task = Task::kRegression;
  out.variant = cfg.variant;

  // Overall: Frobenius product <W^o, u> over pooled rows, normalized by |s|.
  Tensor linear;
  for (const auto& [i, t] : rows) {
    linear = detail::accumulate(g, linear, ops::dot(g, ops::row(g, p.overall_weight, i), t));
  }
  out.overall = ops::scale(g, ops::add(g, linear, p.overall_bias), 1.0 / static_cast<double>(rows.size()));

  Tensor numerator, denominator;
  for (const auto& [i, t] : rows) {
    Tensor score = ops::affine(g, t, p.score_weight, p.score_bias);  // [1]
    Tensor aspect = ops::softmax_lastdim(g, ops::affine(g, t, p.attribution_weight, p.attribution_bias));
    Tensor scaled = ops::mul(g, aspect, score);
    numerator = detail::accumulate(g, numerator, scaled);
    denominator = detail::accumulate(g, denominator, aspect);
    out.slots.push_back(i);
    out.scores.push_back(score);
    out.aspect_dist.push_back(aspect);
    out.scaled_scores.push_back(scaled);
  }
  Tensor pooled = ops::div(g, numerator, ops::add_scalar(g, denominator, cfg.epsilon));
  for (std::size_t j = 0; j < cfg.num_aspects; ++j) {
    out.aspects.push_back(ops::row(g, pooled, j));
    out.attribution_mass.push_back(denominator[j]);
  }
  return out;
}

inline HeadOutput head_flat_forward(Graph& g, const HeadConfig& cfg, const HeadParams& p,
                                    const SentenceEmbeddingMatrix& u) {
  if (cfg.variant != Variant::kFlatC && cfg.variant != Variant::kFlatR) {
    throw ConfigError("head_flat_forward called with variant " + to_string(cfg.variant));
  }
  const auto rows = detail::pooled_rows(g, cfg, u);
  HeadOutput out;
  out.task = cfg.task();
  out.variant = cfg.variant;
  Tensor logits = detail::flattened_linear(g, rows, p.overall_weight, p.overall_bias, cfg.feature_dim);
  const std::size_t width = cfg.task() == Task::kClassification ? cfg.num_classes : 1;
  for (std::size_t k = 0; k <= cfg.num_aspects; ++k) {
    Tensor part = ops::slice(g, logits, k * width, (k + 1) * width);
    Tensor target = cfg.task() == Task::kClassification ? ops::softmax_lastdim(g, part) : ops::row(g, part, 0);
    if (k == 0) {
      out.overall = target;
    } else {
      out.aspects.push_back(target);
    }
  }
  return out;
}

inline HeadOutput head_forward(Graph& g, const HeadConfig& cfg, const HeadParams& p, const SentenceEmbeddingMatrix& u) {
  switch (cfg.variant) {
    case Variant::kC1: return head_c1_forward(g, cfg, p, u);
    case Variant::kC2: return head_c2_forward(g, cfg, p, u);
    case Variant::kR: return head_r_forward(g, cfg, p, u);
    case Variant::kFlatC:
    case Variant::kFlatR: return head_flat_forward(g, cfg, p, u);
  }
  throw ConfigError("unknown variant");
}

}  // namespace saam
