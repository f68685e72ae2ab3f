#pragma once

// Document-level rating metrics, sentence-level attribution accuracy and
// inter-annotator agreement.

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "saam/errors.hpp"
#include "saam/model/predictions.hpp"
#include "saam/text/document.hpp"
#include "saam/training/losses.hpp"

namespace saam {

struct TargetMetrics {
  std::string name;
  std::optional<double> accuracy;  // classification
  double mse = 0.0;
  std::optional<double> r2;        // regression; nullopt when gold variance is zero
};

struct MetricReport {
  Task task = Task::kRegression;
  std::size_t samples = 0;
  std::vector<TargetMetrics> targets;  // overall first, then aspects in order
  std::optional<double> avg_accuracy;  // over aspects only
  double avg_mse = 0.0;
  std::optional<double> avg_r2;

  // Sentence attribution section; set by callers that have gold labels.
  std::optional<double> attribution_accuracy;
  std::size_t attribution_labeled = 0;
  bool attribution_requested = false;

  const TargetMetrics& target(const std::string& name) const {
    for (const auto& t : targets)
      if (t.name == name) return t;
    throw ConfigError("no metrics for target: " + name);
  }
};

struct ColumnScore {
  double accuracy = 0.0;
  double mse = 0.0;
  std::optional<double> r2;
};

namespace detail {

inline void check_aligned(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
  if (a == 0) throw DataError(std::string(what) + ": no samples");
}

}  // namespace detail

// Predicted classes are compared as real values on the rating scale.
inline ColumnScore classification_column(const std::vector<double>& predicted_ratings, const std::vector<double>& gold) {
  detail::check_aligned(predicted_ratings.size(), gold.size(), "classification metrics");
  ColumnScore s;
  std::size_t hits = 0;
  double se = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (predicted_ratings[i] == gold[i]) ++hits;
    const double d = predicted_ratings[i] - gold[i];
    se += d * d;
  }
  const auto n = static_cast<double>(gold.size());
  s.accuracy = static_cast<double>(hits) / n;
  s.mse = se / n;
  return s;
}

inline ColumnScore regression_column(const std::vector<double>& predicted, const std::vector<double>& gold) {
  detail::check_aligned(predicted.size(), gold.size(), "regression metrics");
  ColumnScore s;
  const auto n = static_cast<double>(gold.size());
  double mean = 0.0;
  for (double y : gold) mean += y;
  mean /= n;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ss_res += (predicted[i] - gold[i]) * (predicted[i] - gold[i]);
    ss_tot += (gold[i] - mean) * (gold[i] - mean);
  }
  s.mse = ss_res / n;
  if (gold.size() >= 2 && ss_tot > 0.0) s.r2 = 1.0 - ss_res / ss_tot;
  return s;
}

namespace detail {

inline MetricReport build_report(Task task, const std::vector<PredictionSet>& preds, const std::vector<RatingTargets>& golds,
                                 const AspectSet& aspects) {
  check_aligned(preds.size(), golds.size(), task == Task::kClassification ? "classification metrics" : "regression metrics");
  MetricReport report;
  report.task = task;
  report.samples = preds.size();
  const std::size_t A = aspects.size();
  for (std::size_t t = 0; t <= A; ++t) {
    std::vector<double> p, y;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      if (preds[i].task != task) throw ConfigError("prediction task does not match the metric kind");
      if (preds[i].aspects.size() != A || golds[i].aspects.size() != A) {
        throw DimensionError("prediction/gold aspect count does not match the aspect set");
      }
      p.push_back(t == 0 ? preds[i].overall_rating() : preds[i].aspect_rating(t - 1));
      y.push_back(t == 0 ? golds[i].overall : golds[i].aspects[t - 1]);
    }
    const ColumnScore s = task == Task::kClassification ? classification_column(p, y) : regression_column(p, y);
    TargetMetrics m;
    m.name = t == 0 ? "overall" : aspects.name(t - 1);
    if (task == Task::kClassification) m.accuracy = s.accuracy;
    m.mse = s.mse;
    if (task == Task::kRegression) m.r2 = s.r2;
    report.targets.push_back(m);
  }
  double acc = 0.0, mse = 0.0, r2 = 0.0;
  std::size_t r2_count = 0;
  for (std::size_t t = 1; t <= A; ++t) {
    const auto& m = report.targets[t];
    if (m.accuracy) acc += *m.accuracy;
    mse += m.mse;
    if (m.r2) {
      r2 += *m.r2;
      ++r2_count;
    }
  }
  const auto a = static_cast<double>(A);
  if (task == Task::kClassification) report.avg_accuracy = acc / a;
  report.avg_mse = mse / a;
  if (task == Task::kRegression && r2_count == A) report.avg_r2 = r2 / a;
  return report;
}

}  // namespace detail

inline MetricReport classification_metrics(const std::vector<PredictionSet>& preds, const std::vector<RatingTargets>& golds,
                                           const AspectSet& aspects) {
  return detail::build_report(Task::kClassification, preds, golds, aspects);
}

inline MetricReport regression_metrics(const std::vector<PredictionSet>& preds, const std::vector<RatingTargets>& golds,
                                       const AspectSet& aspects) {
  return detail::build_report(Task::kRegression, preds, golds, aspects);
}

inline MetricReport document_metrics(Task task, const std::vector<PredictionSet>& preds,
                                     const std::vector<RatingTargets>& golds, const AspectSet& aspects) {
  return detail::build_report(task, preds, golds, aspects);
}

struct AttributionTally {
  std::size_t labeled = 0;
  std::size_t correct = 0;

  void add(const std::string& predicted, const std::string& gold) {
    if (gold == kUnlabeled) return;
    ++labeled;
    if (predicted == gold) ++correct;
  }
  std::optional<double> accuracy() const {
    if (labeled == 0) return std::nullopt;
    return static_cast<double>(correct) / static_cast<double>(labeled);
  }
};

// Sentences whose gold label is "unlabeled" are skipped.
inline double attribution_accuracy(const std::vector<std::string>& predicted, const std::vector<std::string>& gold) {
  if (predicted.size() != gold.size()) {
    throw DimensionError("attribution_accuracy: " + std::to_string(predicted.size()) + " predictions for " +
                         std::to_string(gold.size()) + " gold labels");
  }
  AttributionTally tally;
  for (std::size_t i = 0; i < gold.size(); ++i) tally.add(predicted[i], gold[i]);
  if (!tally.accuracy()) throw DataError("attribution_accuracy: no labeled sentences");
  return *tally.accuracy();
}

inline double cohen_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  detail::check_aligned(a.size(), b.size(), "cohen_kappa");
  std::map<std::string, std::size_t> ca, cb;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++ca[a[i]];
    ++cb[b[i]];
    if (a[i] == b[i]) ++agree;
  }
  const auto n = static_cast<double>(a.size());
  const double p_o = static_cast<double>(agree) / n;
  double p_e = 0.0;
  for (const auto& [label, count] : ca) {
    auto it = cb.find(label);
    if (it != cb.end()) p_e += (static_cast<double>(count) / n) * (static_cast<double>(it->second) / n);
  }
  if (p_e >= 1.0) return 1.0;
  return (p_o - p_e) / (1.0 - p_e);
}

// ---- rendering ----

inline double round_to(double v, int decimals = 6) {
  const double f = std::pow(10.0, decimals);
  const double r = std::round(v * f) / f;
  return r == 0.0 ? 0.0 : r;
}

// Rounds first so tiny negatives never print as "-0.000000".
inline std::string format_fixed(double v, int decimals = 6) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(decimals);
  os << round_to(v, decimals);
  return os.str();
}

inline std::string render_text(const MetricReport& r) {
  std::ostringstream os;
  os << "task: " << (r.task == Task::kClassification ? "classification" : "regression") << "\n";
  os << "samples: " << r.samples << "\n";
  auto line = [&](const std::string& key, const std::optional<double>& v) {
    os << key << ": " << (v ? format_fixed(*v) : std::string("undefined")) << "\n";
  };
  for (const auto& t : r.targets) {
    os << "\n[" << t.name << "]\n";
    if (r.task == Task::kClassification) line("accuracy", t.accuracy);
    line("mse", t.mse);
    if (r.task == Task::kRegression) line("r2", t.r2);
  }
  os << "\n[aspect_average]\n";
  if (r.task == Task::kClassification) line("accuracy", r.avg_accuracy);
  line("mse", r.avg_mse);
  if (r.task == Task::kRegression) line("r2", r.avg_r2);
  if (r.attribution_requested) {
    os << "\n[attribution]\n";
    os << "labeled_sentences: " << r.attribution_labeled << "\n";
    os << "accuracy: " << (r.attribution_accuracy ? format_fixed(*r.attribution_accuracy) : std::string("n/a")) << "\n";
  }
  return os.str();
}

inline nlohmann::ordered_json render_json(const MetricReport& r) {
  nlohmann::ordered_json j;
  j["task"] = r.task == Task::kClassification ? "classification" : "regression";
  j["samples"] = r.samples;
  auto put = [&](const std::string& key, const std::optional<double>& v) {
    if (v) j[key] = round_to(*v);
    else j[key] = "undefined";
  };
  for (const auto& t : r.targets) {
    if (r.task == Task::kClassification) put(t.name + ".accuracy", t.accuracy);
    put(t.name + ".mse", t.mse);
    if (r.task == Task::kRegression) put(t.name + ".r2", t.r2);
  }
  if (r.task == Task::kClassification) put("aspect_average.accuracy", r.avg_accuracy);
  put("aspect_average.mse", r.avg_mse);
  if (r.task == Task::kRegression) put("aspect_average.r2", r.avg_r2);
  if (r.attribution_requested) {
    j["attribution.labeled_sentences"] = r.attribution_labeled;
    if (r.attribution_accuracy) j["attribution.accuracy"] = round_to(*r.attribution_accuracy);
    else j["attribution.accuracy"] = "n/a";
  }
  return j;
}

}  // namespace saam
