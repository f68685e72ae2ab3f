#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "saam/evaluation/metrics.hpp"
#include "saam/model/model.hpp"
#include "saam/text/batch.hpp"
#include "saam/training/losses.hpp"

namespace saam {

struct ModelEvaluation {
  MetricReport report;
  double mean_loss = 0.0;
  std::vector<PredictionSet> predictions;
  AttributionTally attribution;
};

// Gold sentence labels are taken from doc.sentence_labels (missing entries
// count as "unlabeled"). Only sentences that survive truncation are scored.
inline void tally_attribution(AttributionTally& tally, const ReviewDocument& doc, const AttributionResult& result,
                              const AspectSet& aspects) {
  for (const auto& s : extract_attribution(result, aspects)) {
    const std::string& gold = s.slot < doc.sentence_labels.size() ? doc.sentence_labels[s.slot] : kUnlabeled;
    tally.add(s.label, gold);
  }
}

inline ModelEvaluation evaluate_model(const SaamModel& model, const std::vector<ReviewDocument>& docs,
                                      bool with_attribution = false, const LossWeights& weights = {}) {
  const ModelConfig& cfg = model.config();
  if (with_attribution && !has_attribution(cfg.variant)) {
    throw ConfigError("variant " + to_string(cfg.variant) + " has no sentence attribution");
  }
  ModelEvaluation ev;
  const PaddedBatch batch = make_batch(docs, cfg.s_max, cfg.t_max);
  std::vector<RatingTargets> golds;
  double loss = 0.0;
  for (std::size_t b = 0; b < docs.size(); ++b) {
    auto inf = model.infer(batch.document(b));
    golds.push_back(RatingTargets::of(docs[b]));
    loss += prediction_loss(inf.predictions, golds.back(), weights);
    if (with_attribution) tally_attribution(ev.attribution, docs[b], inf.attribution, cfg.aspects);
    ev.predictions.push_back(std::move(inf.predictions));
  }
  if (!docs.empty()) {
    ev.mean_loss = loss / static_cast<double>(docs.size());
    ev.report = document_metrics(cfg.task(), ev.predictions, golds, cfg.aspects);
  }
  if (with_attribution) {
    ev.report.attribution_requested = true;
    ev.report.attribution_labeled = ev.attribution.labeled;
    ev.report.attribution_accuracy = ev.attribution.accuracy();
  }
  return ev;
}

}  // namespace saam
