#include <gtest/gtest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "saam/evaluation/evaluate.hpp"
#include "saam/evaluation/metrics.hpp"
#include "saam/rng.hpp"

namespace saam {
namespace {

using Strings = std::vector<std::string>;

PredictionSet one_hot(std::size_t overall_class, std::vector<std::size_t> aspect_classes, std::size_t C = 5) {
  PredictionSet p;
  p.task = Task::kClassification;
  p.overall.assign(C, 0.0);
  p.overall[overall_class - 1] = 1.0;
  for (auto c : aspect_classes) {
    std::vector<double> d(C, 0.01);
    d[c - 1] = 0.96;
    p.aspects.push_back(d);
  }
  return p;
}

PredictionSet scalar(double overall, std::vector<double> aspects) {
  PredictionSet p;
  p.task = Task::kRegression;
  p.overall = {overall};
  for (double a : aspects) p.aspects.push_back({a});
  return p;
}

// ---- classification -------------------------------------------------------

TEST(ClassificationMetrics, ColumnExamples) {
  auto s = classification_column({1, 2, 3}, {1, 2, 3});
  EXPECT_EQ(s.accuracy, 1.0);
  EXPECT_EQ(s.mse, 0.0);
  s = classification_column({3, 3, 3}, {5, 5, 5});
  EXPECT_EQ(s.accuracy, 0.0);
  EXPECT_EQ(s.mse, 4.0);
  s = classification_column({2, 5}, {1, 5});
  EXPECT_EQ(s.accuracy, 0.5);
  EXPECT_EQ(s.mse, 0.5);
}

TEST(ClassificationMetrics, UsesArgmaxClassValues) {
  const AspectSet aspects({"Room"});
  const std::vector<PredictionSet> preds{one_hot(2, {1}), one_hot(5, {4})};
  const std::vector<RatingTargets> golds{{1, {1}}, {5, {1}}};
  const auto r = classification_metrics(preds, golds, aspects);
  EXPECT_EQ(r.samples, 2u);
  EXPECT_EQ(r.target("overall").accuracy, 0.5);
  EXPECT_EQ(r.target("overall").mse, 0.5);
  EXPECT_EQ(r.target("Room").accuracy, 0.5);
  EXPECT_EQ(r.target("Room").mse, 4.5);
  EXPECT_FALSE(r.target("Room").r2.has_value());
}

TEST(ClassificationMetrics, AverageExcludesOverall) {
  const AspectSet aspects({"A", "B"});
  const std::vector<PredictionSet> preds{one_hot(1, {2, 3})};
  const std::vector<RatingTargets> golds{{5, {2, 4}}};
  const auto r = classification_metrics(preds, golds, aspects);
  EXPECT_EQ(*r.avg_accuracy, 0.5);
  EXPECT_EQ(r.avg_mse, 0.5);
  EXPECT_EQ(r.targets.front().name, "overall");
  EXPECT_EQ(r.targets.size(), 3u);
}

TEST(ClassificationMetrics, MseZeroIffAccuracyOne) {
  Rng rng(4);
  for (int n = 0; n < 200; ++n) {
    std::vector<double> p, y;
    for (int i = 0; i < 5; ++i) {
      y.push_back(1.0 + static_cast<double>(rng.index(5)));
      p.push_back(rng.uniform() < 0.7 ? y.back() : 1.0 + static_cast<double>(rng.index(5)));
    }
    const auto s = classification_column(p, y);
    EXPECT_EQ(s.mse == 0.0, s.accuracy == 1.0);
  }
}

TEST(ClassificationMetrics, Errors) {
  EXPECT_THROW(classification_column({1, 2}, {1}), DimensionError);
  EXPECT_THROW(classification_column({}, {}), DataError);
  const AspectSet aspects({"A"});
  EXPECT_THROW(classification_metrics({scalar(1, {1})}, {{1, {1}}}, aspects), ConfigError);
}

// ---- regression -----------------------------------------------------------

TEST(RegressionMetrics, Examples) {
  auto s = regression_column({1, 2, 3}, {1, 2, 3});
  EXPECT_EQ(s.mse, 0.0);
  EXPECT_EQ(*s.r2, 1.0);
  s = regression_column({2, 2, 2}, {1, 2, 3});
  EXPECT_EQ(*s.r2, 0.0);
  s = regression_column({1, 2, 4}, {1, 2, 3});
  EXPECT_DOUBLE_EQ(s.mse, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(*s.r2, 0.5);
}

TEST(RegressionMetrics, UndefinedR2) {
  EXPECT_FALSE(regression_column({1, 2}, {3, 3}).r2.has_value());
  EXPECT_FALSE(regression_column({1}, {3}).r2.has_value());
}

TEST(RegressionMetrics, GoldMeanPredictorIsExactlyZero) {
  Rng rng(8);
  for (int n = 0; n < 200; ++n) {
    std::vector<double> y;
    for (int i = 0; i < 8; ++i) y.push_back(1.0 + 0.5 * static_cast<double>(rng.index(9)));
    if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) continue;
    double mean = 0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    const auto s = regression_column(std::vector<double>(y.size(), mean), y);
    ASSERT_TRUE(s.r2.has_value());
    EXPECT_EQ(*s.r2, 0.0);
  }
}

TEST(RegressionMetrics, R2NeverAboveOne) {
  Rng rng(9);
  for (int n = 0; n < 200; ++n) {
    std::vector<double> p, y;
    for (int i = 0; i < 6; ++i) {
      y.push_back(rng.uniform(1, 5));
      p.push_back(rng.uniform(1, 5));
    }
    EXPECT_LE(*regression_column(p, y).r2, 1.0);
  }
}

TEST(RegressionMetrics, ReportAverages) {
  const AspectSet aspects({"A", "B"});
  const std::vector<PredictionSet> preds{scalar(3, {1, 2}), scalar(4, {2, 2}), scalar(5, {3, 2})};
  const std::vector<RatingTargets> golds{{3, {1, 1}}, {4, {2, 2}}, {5, {4, 3}}};
  const auto r = regression_metrics(preds, golds, aspects);
  EXPECT_DOUBLE_EQ(r.target("A").mse, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(*r.target("A").r2, 1.0 - 3.0 / 14.0);
  EXPECT_DOUBLE_EQ(r.target("B").mse, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(*r.target("B").r2, 0.0);
  EXPECT_DOUBLE_EQ(r.avg_mse, 0.5);
  EXPECT_DOUBLE_EQ(*r.avg_r2, (*r.target("A").r2 + 0.0) / 2.0);
  EXPECT_FALSE(r.avg_accuracy.has_value());
}

TEST(RegressionMetrics, AverageR2UndefinedWhenAnyAspectIs) {
  const AspectSet aspects({"A", "B"});
  const std::vector<PredictionSet> preds{scalar(3, {1, 2}), scalar(4, {2, 2})};
  const std::vector<RatingTargets> golds{{3, {1, 5}}, {4, {2, 5}}};
  const auto r = regression_metrics(preds, golds, aspects);
  EXPECT_FALSE(r.target("B").r2.has_value());
  EXPECT_FALSE(r.avg_r2.has_value());
}

// ---- attribution ----------------------------------------------------------

TEST(AttributionAccuracy, Examples) {
  EXPECT_EQ(attribution_accuracy({"Room", "Service"}, {"Room", "Service"}), 1.0);
  EXPECT_EQ(attribution_accuracy({"none", "Room"}, {"none", "Room"}), 1.0);
  EXPECT_DOUBLE_EQ(attribution_accuracy({"Room", "Room", "Service", "Room"}, {"Room", "Service", "Service", kUnlabeled}),
                   2.0 / 3.0);
  EXPECT_THROW(attribution_accuracy({"Room"}, {kUnlabeled}), DataError);
  EXPECT_THROW(attribution_accuracy({"Room"}, {}), DimensionError);
}

TEST(AttributionAccuracy, InvariantToPairedPermutation) {
  Strings pred{"A", "B", "none", "A", "B", "A"};
  Strings gold{"A", "A", "none", kUnlabeled, "B", "B"};
  const double base = attribution_accuracy(pred, gold);
  std::vector<std::size_t> idx{0, 1, 2, 3, 4, 5};
  Rng rng(3);
  for (int n = 0; n < 20; ++n) {
    rng.shuffle(std::span<std::size_t>(idx));
    Strings p, g;
    for (auto i : idx) {
      p.push_back(pred[i]);
      g.push_back(gold[i]);
    }
    EXPECT_EQ(attribution_accuracy(p, g), base);
  }
}

TEST(AttributionAccuracy, TallyFromAttributionResult) {
  ReviewDocument doc;
  doc.sentence_labels = {"Room", "none", kUnlabeled};
  AttributionResult r;
  r.variant = Variant::kR;
  r.num_aspects = 2;
  r.slots = {0, 1, 2};
  r.aspect_dist = {{0.8, 0.1, 0.1}, {0.1, 0.1, 0.8}, {0.1, 0.8, 0.1}};
  r.rating_scores = {{1}, {2}, {3}};
  AttributionTally tally;
  tally_attribution(tally, doc, r, AspectSet({"Room", "Service"}));
  EXPECT_EQ(tally.labeled, 2u);
  EXPECT_EQ(tally.correct, 2u);
}

// ---- kappa ----------------------------------------------------------------

TEST(CohenKappa, HandCases) {
  EXPECT_EQ(cohen_kappa({"x", "x", "y", "y"}, {"x", "y", "x", "y"}), 0.0);
  EXPECT_EQ(cohen_kappa({"x", "y", "z", "x"}, {"x", "y", "z", "x"}), 1.0);
  EXPECT_EQ(cohen_kappa({"x", "x", "x"}, {"x", "x", "x"}), 1.0);
  EXPECT_EQ(cohen_kappa({"x", "x"}, {"y", "y"}), 0.0);
  // p_o = 0.75, p_e = 0.5 -> 0.5
  EXPECT_DOUBLE_EQ(cohen_kappa({"x", "x", "y", "y"}, {"x", "x", "y", "x"}), 0.5);
}

TEST(CohenKappa, SelfAgreementIsOne) {
  Rng rng(12);
  for (int n = 0; n < 50; ++n) {
    Strings a;
    for (int i = 0; i < 20; ++i) a.push_back(std::string(1, static_cast<char>('a' + rng.index(4))));
    if (std::all_of(a.begin(), a.end(), [&](const auto& s) { return s == a[0]; })) continue;
    EXPECT_DOUBLE_EQ(cohen_kappa(a, a), 1.0);
  }
}

TEST(CohenKappa, IndependentLabelingsNearZero) {
  Rng rng(21);
  Strings a, b;
  for (int i = 0; i < 20000; ++i) {
    a.push_back(rng.uniform() < 0.5 ? "x" : "y");
    b.push_back(rng.uniform() < 0.5 ? "x" : "y");
  }
  EXPECT_NEAR(cohen_kappa(a, b), 0.0, 0.03);
}

// ---- rendering ------------------------------------------------------------

TEST(Rendering, TextAndJsonCarrySameNumbers) {
  const AspectSet aspects({"A", "B"});
  const std::vector<PredictionSet> preds{scalar(3, {1, 2}), scalar(4, {2, 2}), scalar(5, {3, 2})};
  const std::vector<RatingTargets> golds{{3, {1, 1}}, {4, {2, 2}}, {5, {4, 3}}};
  auto r = regression_metrics(preds, golds, aspects);
  r.attribution_requested = true;
  r.attribution_labeled = 3;
  r.attribution_accuracy = 2.0 / 3.0;
  const auto text = render_text(r);
  const auto json = render_json(r);
  EXPECT_NE(text.find("[A]\nmse: 0.333333\n"), std::string::npos) << text;
  EXPECT_NE(text.find("[aspect_average]\nmse: 0.500000\n"), std::string::npos) << text;
  EXPECT_NE(text.find("[attribution]\nlabeled_sentences: 3\naccuracy: 0.666667\n"), std::string::npos) << text;
  EXPECT_EQ(json["A.mse"].get<double>(), 0.333333);
  EXPECT_EQ(json["aspect_average.mse"].get<double>(), 0.5);
  EXPECT_EQ(json["attribution.accuracy"].get<double>(), 0.666667);
  EXPECT_EQ(json["B.r2"].get<double>(), 0.0);
  EXPECT_EQ(format_fixed(json["A.r2"].get<double>()), format_fixed(*r.target("A").r2));
}

TEST(Rendering, UndefinedMarkers) {
  const AspectSet aspects({"A"});
  auto r = regression_metrics({scalar(3, {1}), scalar(4, {2})}, {{3, {5}}, {4, {5}}}, aspects);
  r.attribution_requested = true;
  EXPECT_NE(render_text(r).find("r2: undefined"), std::string::npos);
  EXPECT_NE(render_text(r).find("accuracy: n/a"), std::string::npos);
  const auto j = render_json(r);
  EXPECT_EQ(j["A.r2"], "undefined");
  EXPECT_EQ(j["aspect_average.r2"], "undefined");
  EXPECT_EQ(j["attribution.accuracy"], "n/a");
}

TEST(Rendering, NoNegativeZero) {
  EXPECT_EQ(format_fixed(-0.0), "0.000000");
  EXPECT_EQ(format_fixed(-1e-9), "0.000000");
  EXPECT_EQ(format_fixed(2.0 / 3.0), "0.666667");
  EXPECT_EQ(round_to(-1e-9), 0.0);
  EXPECT_FALSE(std::signbit(round_to(-1e-9)));
}

}  // namespace
}  // namespace saam
