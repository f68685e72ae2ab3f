#pragma once

// Extreme-sentiment sentence selection per aspect. Candidates are filtered
// by attribution weight and ranked by the raw sentence score.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "saam/errors.hpp"
#include "saam/model/predictions.hpp"
#include "saam/text/document.hpp"

namespace saam {

constexpr double kDefaultTau = 0.3;
constexpr double kDefaultDiscrepancyMargin = 1.0;

enum class Polarity { kHighest, kLowest };

inline std::string to_string(Polarity p) { return p == Polarity::kHighest ? "highest" : "lowest"; }

inline Polarity parse_polarity(const std::string& s) {
  if (s == "highest") return Polarity::kHighest;
  if (s == "lowest") return Polarity::kLowest;
  throw ConfigError("unknown polarity: " + s);
}

struct Snippet {
  std::string doc_id;
  std::size_t sentence_index = 0;
  std::string text;
  std::string aspect;
  double weight = 0.0;
  double score = 0.0;
  Polarity polarity = Polarity::kLowest;
};

struct SnippetQuery {
  std::string aspect;
  Polarity polarity = Polarity::kLowest;
  double tau = kDefaultTau;
  std::optional<std::size_t> top_k;  // nullopt: every candidate
};

inline std::string sentence_text(const ReviewDocument& doc, std::size_t i) {
  if (i < doc.sentence_texts.size()) return doc.sentence_texts[i];
  if (i < doc.tokens.size()) {
    std::string s;
    for (const auto& t : doc.tokens[i]) s += (s.empty() ? "" : " ") + t;
    return s;
  }
  return {};
}

// Classification results use the expected class value as the score.
inline std::vector<Snippet> extract_snippets(const ReviewDocument& doc, const AttributionResult& result,
                                             const AspectSet& aspects, const SnippetQuery& q) {
  if (!(q.tau >= 0.0 && q.tau < 1.0)) throw ConfigError("tau must be in [0, 1)");
  const auto j = aspects.find(q.aspect);
  if (!j) throw ConfigError("unknown aspect: " + q.aspect);
  std::vector<Snippet> out;
  for (std::size_t k = 0; k < result.sentences(); ++k) {
    const double w = result.aspect_dist[k].at(*j);
    if (w < q.tau) continue;
    const std::size_t idx = result.slots[k];
    out.push_back({doc.doc_id, idx, sentence_text(doc, idx), aspects.name(*j), w, result.sentiment(k), q.polarity});
  }
  std::stable_sort(out.begin(), out.end(), [&](const Snippet& a, const Snippet& b) {
    if (a.score != b.score) return q.polarity == Polarity::kLowest ? a.score < b.score : a.score > b.score;
    return a.sentence_index < b.sentence_index;
  });
  if (q.top_k && out.size() > *q.top_k) out.resize(*q.top_k);
  return out;
}

struct Discrepancy {
  std::string aspect;
  double overall = 0.0;
  double aspect_score = 0.0;
  Polarity side = Polarity::kLowest;
  std::optional<Snippet> snippet;  // empty when no sentence passes tau
};

// Aspects whose prediction differs from the overall prediction by more than
// `margin`, each with the extreme snippet on the deviating side.
inline std::vector<Discrepancy> explain_discrepancy(const ReviewDocument& doc, const PredictionSet& preds,
                                                    const AttributionResult& result, const AspectSet& aspects,
                                                    double tau = kDefaultTau, double margin = kDefaultDiscrepancyMargin) {
  std::vector<Discrepancy> out;
  const double overall = preds.task == Task::kRegression ? preds.overall.at(0) : preds.overall_rating();
  for (std::size_t j = 0; j < aspects.size(); ++j) {
    const double a = preds.task == Task::kRegression ? preds.aspects.at(j).at(0) : preds.aspect_rating(j);
    if (std::abs(a - overall) <= margin) continue;
    Discrepancy d;
    d.aspect = aspects.name(j);
    d.overall = overall;
    d.aspect_score = a;
    d.side = a < overall ? Polarity::kLowest : Polarity::kHighest;
    auto snippets = extract_snippets(doc, result, aspects, {d.aspect, d.side, tau, 1});
    if (!snippets.empty()) d.snippet = snippets.front();
    out.push_back(std::move(d));
  }
  return out;
}

inline std::string format_3(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  const double r = std::round(v * 1000.0) / 1000.0;
  os << (r == 0.0 ? 0.0 : r);
  return os.str();
}

// `text [Aspect, score]`
inline std::string render_snippet(const Snippet& s) {
  return s.text + " [" + s.aspect + ", " + format_3(s.score) + "]";
}

inline std::string render_snippet_line(const Snippet& s) {
  return s.doc_id + "\t" + std::to_string(s.sentence_index) + "\t" + to_string(s.polarity) + "\tweight=" +
         format_3(s.weight) + "\t" + render_snippet(s);
}

inline nlohmann::ordered_json snippet_json(const Snippet& s) {
  nlohmann::ordered_json j;
  j["doc_id"] = s.doc_id;
  j["sentence_index"] = s.sentence_index;
  j["aspect"] = s.aspect;
  j["polarity"] = to_string(s.polarity);
  j["score"] = format_3(s.score);
  j["weight"] = format_3(s.weight);
  j["text"] = s.text;
  return j;
}

// Per-sentence annotation with the dominant attribution slot, e.g.
// `the staff were rude [Service, -2.890]`.
inline std::string render_annotated_sentence(const ReviewDocument& doc, const AttributionResult& result,
                                             const AspectSet& aspects, std::size_t k) {
  const auto labels = extract_attribution(result, aspects);
  const auto& a = labels.at(k);
  return sentence_text(doc, a.slot) + " [" + a.label + ", " + format_3(result.sentiment(k)) + "]";
}

}  // namespace saam
