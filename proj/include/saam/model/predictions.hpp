#pragma once

// Plain-value views of head outputs: document-level predictions and the
// per-sentence latent attribution.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "saam/model/heads.hpp"
#include "saam/text/document.hpp"

namespace saam {

// Aspect attribution mass below this is flagged: the pooled R score is then
// dominated by the epsilon guard rather than by any sentence.
constexpr double kLowAttributionMass = 1e-3;

inline std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

struct PredictionSet {
  Task task = Task::kRegression;
  std::vector<double> overall;               // |C| distribution, or one value
  std::vector<std::vector<double>> aspects;  // |A| entries of the same kind
  std::vector<bool> low_attribution;         // R only

  // Rating on the 1..|C| scale (argmax class + 1) or the regressed value.
  double overall_rating() const { return rating_of(overall); }
  double aspect_rating(std::size_t j) const { return rating_of(aspects.at(j)); }

 private:
  double rating_of(const std::vector<double>& v) const {
    return task == Task::kClassification ? static_cast<double>(argmax(v) + 1) : v.at(0);
  }
};

struct AttributionResult {
  Variant variant = Variant::kR;
  std::size_t num_aspects = 0;
  std::vector<std::size_t> slots;                    // sentence positions
  std::vector<std::vector<double>> aspect_dist;      // per sentence, |A|+1 or |A|+2
  std::vector<std::vector<double>> rating_scores;    // per sentence, |C| or 1
  std::vector<std::vector<std::vector<double>>> scaled_scores;  // per sentence, slots x |C| (or slots x 1)

  std::size_t sentences() const { return slots.size(); }

  // Scalar sentiment per sentence: the R score, or for classification the
  // expected class value sum_c (c+1) softmax(score)[c].
  double sentiment(std::size_t k) const {
    const auto& s = rating_scores.at(k);
    if (s.size() == 1) return s[0];
    const double mx = *std::max_element(s.begin(), s.end());
    double z = 0.0, ev = 0.0;
    for (std::size_t c = 0; c < s.size(); ++c) {
      const double e = std::exp(s[c] - mx);
      z += e;
      ev += static_cast<double>(c + 1) * e;
    }
    return ev / z;
  }
};

inline PredictionSet to_predictions(const HeadOutput& out) {
  PredictionSet p;
  p.task = out.task;
  p.overall = out.overall.values();
  for (const auto& a : out.aspects) p.aspects.push_back(a.values());
  for (double mass : out.attribution_mass) p.low_attribution.push_back(mass < kLowAttributionMass);
  return p;
}

inline AttributionResult to_attribution(const HeadOutput& out, std::size_t num_aspects) {
  AttributionResult r;
  r.variant = out.variant;
  r.num_aspects = num_aspects;
  r.slots = out.slots;
  for (std::size_t k = 0; k < out.slots.size(); ++k) {
    r.aspect_dist.push_back(out.aspect_dist[k].values());
    r.rating_scores.push_back(out.scores[k].values());
    const Tensor& s = out.scaled_scores[k];
    const std::size_t rows = s.dim(0);
    const std::size_t cols = s.rank() == 2 ? s.dim(1) : 1;
    std::vector<std::vector<double>> m(rows, std::vector<double>(cols));
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t c = 0; c < cols; ++c) m[i][c] = s[i * cols + c];
    r.scaled_scores.push_back(std::move(m));
  }
  return r;
}

struct SentenceAttribution {
  std::size_t slot = 0;
  std::size_t attribution_index = 0;
  std::string label;
  double confidence = 0.0;
};

// Label of attribution slot k: an aspect name for k < |A|; "none" for the
// other-aspect slot; for C2 slot |A| is "overall" and |A|+1 is "none".
inline std::string slot_label(Variant variant, const AspectSet& aspects, std::size_t k) {
  if (k < aspects.size()) return aspects.name(k);
  if (variant == Variant::kC2 && k == aspects.size()) return "overall";
  return kNoneLabel;
}

// Dominant slot per sentence; ties go to the lowest index.
inline std::vector<SentenceAttribution> extract_attribution(const AttributionResult& result, const AspectSet& aspects) {
  std::vector<SentenceAttribution> out;
  for (std::size_t k = 0; k < result.sentences(); ++k) {
    const auto& dist = result.aspect_dist[k];
    const std::size_t best = argmax(dist);
    out.push_back({result.slots[k], best, slot_label(result.variant, aspects, best), dist[best]});
  }
  return out;
}

}  // namespace saam
