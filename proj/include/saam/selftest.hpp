#pragma once

// Gradient checks for every tensor op and every encoder x head pairing, plus
// loop-based reference implementations of the heads.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "saam/autodiff/grad_check.hpp"
#include "saam/autodiff/ops.hpp"
#include "saam/model/heads.hpp"
#include "saam/model/model.hpp"
#include "saam/rng.hpp"
#include "saam/text/batch.hpp"
#include "saam/training/losses.hpp"

namespace saam::selftest {

// ---------------------------------------------------------------------------
// Loop-based head references. They read raw values only and never use the
// outer-product or Frobenius formulations.

struct ReferenceOutput {
  std::vector<double> overall;
  std::vector<std::vector<double>> aspects;
  std::vector<std::vector<double>> aspect_dist;  // per pooled sentence
};

namespace detail {

inline std::vector<double> softmax(const std::vector<double>& x) {
  double mx = x[0];
  for (double v : x) mx = std::max(mx, v);
  std::vector<double> out(x.size());
  double z = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) z += out[i] = std::exp(x[i] - mx);
  for (double& v : out) v /= z;
  return out;
}

// Rows of u that a head pools over (hard mask: real rows only).
inline std::vector<std::size_t> pooled_indices(const HeadConfig& cfg, const SentenceEmbeddingMatrix& u) {
  std::vector<std::size_t> idx;
  const std::size_t n = cfg.mask_mode == MaskMode::kHard ? u.rows() : cfg.s_max;
  for (std::size_t i = 0; i < n; ++i)
    if (cfg.mask_mode == MaskMode::kSoft || u.mask[i]) idx.push_back(i);
  return idx;
}

inline double u_at(const SentenceEmbeddingMatrix& u, std::size_t i, std::size_t k, std::size_t d) {
  if (i >= u.rows() || !u.mask[i]) return 0.0;
  return u.values[i * d + k];
}

}  // namespace detail

inline ReferenceOutput reference_classification_head(const HeadConfig& cfg, const HeadParams& p,
                                                     const SentenceEmbeddingMatrix& u) {
  const std::size_t d = cfg.feature_dim, C = cfg.num_classes, A = cfg.num_aspects, S = cfg.attribution_slots();
  const auto idx = detail::pooled_indices(cfg, u);
  std::vector<std::vector<double>> total(S, std::vector<double>(C, 0.0));
  ReferenceOutput out;
  for (std::size_t i : idx) {
    std::vector<double> score(C), logits(S);
    for (std::size_t c = 0; c < C; ++c) {
      double acc = p.score_bias[c];
      for (std::size_t k = 0; k < d; ++k) acc += detail::u_at(u, i, k, d) * p.score_weight[k * C + c];
      score[c] = acc;
    }
    for (std::size_t m = 0; m < S; ++m) {
      double acc = p.attribution_bias[m];
      for (std::size_t k = 0; k < d; ++k) acc += detail::u_at(u, i, k, d) * p.attribution_weight[k * S + m];
      logits[m] = acc;
    }
    const auto aspect = detail::softmax(logits);
    for (std::size_t j = 0; j < S; ++j)
      for (std::size_t c = 0; c < C; ++c) total[j][c] += aspect[j] * score[c];
    out.aspect_dist.push_back(aspect);
  }
  for (std::size_t j = 0; j < A; ++j) out.aspects.push_back(detail::softmax(total[j]));
  if (cfg.variant == Variant::kC1) {
    std::vector<double> logits(C);
    for (std::size_t c = 0; c < C; ++c) {
      double acc = p.overall_bias[c];
      for (std::size_t i : idx)
        for (std::size_t k = 0; k < d; ++k) acc += detail::u_at(u, i, k, d) * p.overall_weight[(i * d + k) * C + c];
      logits[c] = acc;
    }
    out.overall = detail::softmax(logits);
  } else {
    out.overall = detail::softmax(total[A]);
  }
  return out;
}

inline ReferenceOutput reference_r_head(const HeadConfig& cfg, const HeadParams& p, const SentenceEmbeddingMatrix& u) {
  const std::size_t d = cfg.feature_dim, A = cfg.num_aspects, S = cfg.attribution_slots();
  const auto idx = detail::pooled_indices(cfg, u);
  ReferenceOutput out;
  double linear = p.overall_bias[0];
  std::vector<double> num(S, 0.0), den(S, 0.0);
  for (std::size_t i : idx) {
    for (std::size_t k = 0; k < d; ++k) linear += p.overall_weight[i * d + k] * detail::u_at(u, i, k, d);
    double score = p.score_bias[0];
    for (std::size_t k = 0; k < d; ++k) score += detail::u_at(u, i, k, d) * p.score_weight[k];
    std::vector<double> logits(S);
    for (std::size_t m = 0; m < S; ++m) {
      double acc = p.attribution_bias[m];
      for (std::size_t k = 0; k < d; ++k) acc += detail::u_at(u, i, k, d) * p.attribution_weight[k * S + m];
      logits[m] = acc;
    }
    const auto aspect = detail::softmax(logits);
    for (std::size_t j = 0; j < S; ++j) {
      num[j] += aspect[j] * score;
      den[j] += aspect[j];
    }
    out.aspect_dist.push_back(aspect);
  }
  out.overall = {linear / static_cast<double>(idx.size())};
  for (std::size_t j = 0; j < A; ++j) out.aspects.push_back({num[j] / (den[j] + cfg.epsilon)});
  return out;
}

inline ReferenceOutput reference_head(const HeadConfig& cfg, const HeadParams& p, const SentenceEmbeddingMatrix& u) {
  if (cfg.variant == Variant::kR) return reference_r_head(cfg, p, u);
  if (cfg.variant == Variant::kC1 || cfg.variant == Variant::kC2) return reference_classification_head(cfg, p, u);
  throw ConfigError("no reference implementation for variant " + to_string(cfg.variant));
}

// ---------------------------------------------------------------------------
// Random head instances.

struct HeadInstance {
  HeadConfig config;
  ParameterStore store;
  HeadParams params;
  SentenceEmbeddingMatrix u;
};

// Random parameters (biases included) and a random u with `real` real rows
// among `rows` (real rows first unless shuffle_mask).
inline HeadInstance random_head_instance(const HeadConfig& cfg, Rng& rng, std::size_t rows, std::size_t real,
                                         bool shuffle_mask = false) {
  HeadInstance h;
  h.config = cfg;
  h.params = init_head(cfg, h.store, rng);
  for (auto& e : h.store.entries())
    for (double& v : e.tensor.mutable_data()) v = rng.uniform(-1.0, 1.0);
  std::vector<std::uint8_t> mask(rows, 0);
  for (std::size_t i = 0; i < real; ++i) mask[i] = 1;
  if (shuffle_mask) rng.shuffle(std::span<std::uint8_t>(mask));
  std::vector<double> values(rows * cfg.feature_dim, 0.0);
  for (std::size_t i = 0; i < rows; ++i)
    if (mask[i])
      for (std::size_t k = 0; k < cfg.feature_dim; ++k) values[i * cfg.feature_dim + k] = rng.uniform(-1.0, 1.0);
  h.u.values = Tensor::matrix(rows, cfg.feature_dim, std::move(values));
  h.u.mask = std::move(mask);
  return h;
}

// ---------------------------------------------------------------------------
// Grad-check suites.

struct CheckOutcome {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelftestOptions {
  GradCheckOptions grad;
  // Name of a check whose analytic gradient is deliberately scaled (fixture
  // for verifying that failures are reported).
  std::string corrupt_check;
  double corrupt_factor = 1.5;
};

struct SelftestReport {
  std::vector<CheckOutcome> checks;
  double seconds = 0.0;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return !checks.empty();
  }
  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
      if (!c.passed) out.push_back(c.name);
    return out;
  }
};

// Identity forward; backward multiplies the incoming gradient by `factor`.
inline Tensor corrupt_gradient(Graph& g, const Tensor& x, double factor) {
  auto gx = ops::detail::grad_target(x);
  return g.record("corrupt_gradient", x.shape(), x.values(), {&x}, [gx, factor](TensorNode& self) {
    if (!gx) return;
    gx->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) gx->grad[i] += factor * self.grad[i];
  });
}

struct GradCase {
  std::string name;
  std::vector<NamedTensor> params;
  std::function<Tensor(Graph&)> output;  // any-shape output; the suite projects it to a scalar
};

namespace detail {

inline Tensor random_tensor(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = rng.uniform(lo, hi);
  return Tensor::from(std::move(shape), std::move(v), true);
}

// Values whose magnitude stays >= 0.2, keeping relu/max away from kinks.
inline Tensor kink_free_tensor(Rng& rng, Shape shape) {
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.2, 1.0);
  return Tensor::from(std::move(shape), std::move(v), true);
}

inline Tensor distinct_tensor(Rng& rng, Shape shape) {
  const std::size_t n = shape_numel(shape);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i) * 0.1;
  rng.shuffle(std::span<double>(v));
  return Tensor::from(std::move(shape), std::move(v), true);
}

}  // namespace detail

inline std::vector<GradCase> op_cases(std::uint64_t seed = 11) {
  using detail::random_tensor;
  Rng rng(seed);
  std::vector<GradCase> cases;
  auto add = [&](std::string name, std::vector<NamedTensor> params, std::function<Tensor(Graph&)> f) {
    cases.push_back({std::move(name), std::move(params), std::move(f)});
  };
  {
    Tensor a = random_tensor(rng, {3, 4}), b = random_tensor(rng, {4, 2});
    add("matmul", {{"a", a}, {"b", b}}, [a, b](Graph& g) { return ops::matmul(g, a, b); });
  }
  {
    Tensor x = random_tensor(rng, {4}), w = random_tensor(rng, {4, 3}), b = random_tensor(rng, {3});
    add("affine_vector", {{"x", x}, {"w", w}, {"b", b}}, [x, w, b](Graph& g) { return ops::affine(g, x, w, b); });
  }
  {
    Tensor x = random_tensor(rng, {2, 4}), w = random_tensor(rng, {4, 3}), b = random_tensor(rng, {3});
    add("affine_matrix", {{"x", x}, {"w", w}, {"b", b}}, [x, w, b](Graph& g) { return ops::affine(g, x, w, b); });
  }
  {
    Tensor u = random_tensor(rng, {3}), v = random_tensor(rng, {4});
    add("outer", {{"u", u}, {"v", v}}, [u, v](Graph& g) { return ops::outer(g, u, v); });
  }
  {
    Tensor a = random_tensor(rng, {2, 3}), b = random_tensor(rng, {2, 3}), s = random_tensor(rng, {});
    add("add", {{"a", a}, {"b", b}}, [a, b](Graph& g) { return ops::add(g, a, b); });
    add("add_broadcast", {{"a", a}, {"s", s}}, [a, s](Graph& g) { return ops::add(g, a, s); });
    add("sub", {{"a", a}, {"b", b}}, [a, b](Graph& g) { return ops::sub(g, a, b); });
    add("mul", {{"a", a}, {"b", b}}, [a, b](Graph& g) { return ops::mul(g, a, b); });
    add("mul_broadcast", {{"s", s}, {"b", b}}, [s, b](Graph& g) { return ops::mul(g, s, b); });
  }
  {
    Tensor a = random_tensor(rng, {5}), b = random_tensor(rng, {5}, 0.5, 2.0);
    add("div", {{"a", a}, {"b", b}}, [a, b](Graph& g) { return ops::div(g, a, b); });
  }
  {
    Tensor a = random_tensor(rng, {2, 3});
    add("scale", {{"a", a}}, [a](Graph& g) { return ops::scale(g, a, -1.7); });
    add("add_scalar", {{"a", a}}, [a](Graph& g) { return ops::add_scalar(g, a, 0.3); });
    add("tanh", {{"a", a}}, [a](Graph& g) { return ops::tanh(g, a); });
    add("sigmoid", {{"a", a}}, [a](Graph& g) { return ops::sigmoid(g, a); });
    add("mask_multiply", {{"a", a}}, [a](Graph& g) { return ops::mask_multiply(g, a, {1.0, 0.0, 2.0, 0.5, 0.0, 1.0}); });
  }
  {
    Tensor a = detail::kink_free_tensor(rng, {2, 4});
    add("relu", {{"a", a}}, [a](Graph& g) { return ops::relu(g, a); });
  }
  {
    Tensor v = random_tensor(rng, {5}), m = random_tensor(rng, {3, 4});
    add("softmax_vector", {{"v", v}}, [v](Graph& g) { return ops::softmax_lastdim(g, v); });
    add("softmax_rows", {{"m", m}}, [m](Graph& g) { return ops::softmax_lastdim(g, m); });
    add("sum_axis0", {{"m", m}}, [m](Graph& g) { return ops::sum(g, m, 0); });
    add("sum_axis1", {{"m", m}}, [m](Graph& g) { return ops::sum(g, m, 1); });
    add("mean_axis0", {{"m", m}}, [m](Graph& g) { return ops::mean(g, m, 0); });
    add("sum_all", {{"m", m}}, [m](Graph& g) { return ops::sum_all(g, m); });
    add("slice", {{"m", m}}, [m](Graph& g) { return ops::slice(g, m, 1, 3); });
    add("row", {{"m", m}}, [m](Graph& g) { return ops::row(g, m, 2); });
    add("reshape", {{"m", m}}, [m](Graph& g) { return ops::reshape(g, m, {4, 3}); });
  }
  {
    Tensor a = random_tensor(rng, {4}), b = random_tensor(rng, {4});
    add("dot", {{"a", a}, {"b", b}}, [a, b](Graph& g) { return ops::dot(g, a, b); });
  }
  {
    Tensor m = detail::distinct_tensor(rng, {4, 3});
    add("max_over_axis", {{"m", m}}, [m](Graph& g) { return ops::max_over_axis(g, m, 0); });
  }
  {
    Tensor table = random_tensor(rng, {6, 3});
    add("embedding_lookup", {{"table", table}}, [table](Graph& g) {
      const std::vector<int> ids{4, 1, 4, 0};
      return ops::embedding_lookup(g, table, ids);
    });
  }
  {
    Tensor a = random_tensor(rng, {2}), b = random_tensor(rng, {3});
    add("concat", {{"a", a}, {"b", b}}, [a, b](Graph& g) {
      const std::vector<Tensor> parts{a, b};
      return ops::concat(g, parts);
    });
    Tensor c = random_tensor(rng, {3});
    add("stack_rows", {{"b", b}, {"c", c}}, [b, c](Graph& g) {
      const std::vector<Tensor> rows{b, c};
      return ops::stack_rows(g, rows);
    });
  }
  {
    Tensor x = random_tensor(rng, {5, 2}), shortx = random_tensor(rng, {2, 2});
    add("unfold", {{"x", x}}, [x](Graph& g) { return ops::unfold(g, x, 3); });
    add("unfold_padded", {{"x", shortx}}, [shortx](Graph& g) { return ops::unfold(g, shortx, 3); });
  }
  {
    Tensor logits = random_tensor(rng, {4});
    add("cross_entropy", {{"logits", logits}}, [logits](Graph& g) {
      return ops::cross_entropy(g, ops::softmax_lastdim(g, logits), 2);
    });
    Tensor p = random_tensor(rng, {});
    add("squared_error", {{"p", p}}, [p](Graph& g) { return ops::squared_error(g, p, 0.7); });
  }
  return cases;
}

// Scalar projection loss = sum(out * r) with a fixed random r, so every
// output element carries a distinct upstream gradient.
inline CheckOutcome run_grad_case(GradCase& c, const SelftestOptions& options, std::uint64_t projection_seed = 5) {
  CheckOutcome outcome;
  outcome.name = c.name;
  try {
    Tensor probe;
    {
      Graph g;
      probe = c.output(g);
    }
    Rng rng(projection_seed);
    std::vector<double> r(probe.numel());
    for (double& v : r) v = rng.uniform(0.5, 1.5);
    const Tensor weights = Tensor::from(probe.shape(), std::move(r));
    const bool corrupt = c.name == options.corrupt_check;
    const double factor = options.corrupt_factor;
    auto build = [&c, weights, corrupt, factor](Graph& g) {
      Tensor out = c.output(g);
      if (corrupt) out = corrupt_gradient(g, out, factor);
      return ops::dot(g, out, weights);
    };
    const auto report = grad_check(build, c.params, options.grad);
    outcome.passed = report.passed;
    outcome.detail = report.summary();
  } catch (const std::exception& e) {
    outcome.passed = false;
    outcome.detail = std::string("error: ") + e.what();
  }
  return outcome;
}

// Toy dims: d=8, S_max=4, |A|=2, |C|=3.
struct ToyDims {
  std::size_t feature_dim = 8;
  std::size_t s_max = 4;
  std::size_t t_max = 6;
  std::size_t num_aspects = 2;
  std::size_t num_classes = 3;
  std::size_t embedding_dim = 5;
  std::size_t vocab_size = 12;
};

inline EncoderConfig toy_encoder(EncoderKind kind, const ToyDims& dims = {}) {
  EncoderConfig e;
  e.kind = kind;
  e.embedding_dim = kind == EncoderKind::kMean ? dims.feature_dim : dims.embedding_dim;
  e.filter_widths = {2, 3};
  e.filters_per_width = dims.feature_dim / 2;
  e.hidden_size = dims.feature_dim;
  return e;
}

inline ModelConfig toy_model_config(Variant variant, EncoderKind kind, const ToyDims& dims = {}) {
  ModelConfig c;
  c.variant = variant;
  c.encoder = toy_encoder(kind, dims);
  std::vector<std::string> names;
  for (std::size_t j = 0; j < dims.num_aspects; ++j) names.push_back("Aspect" + std::to_string(j + 1));
  c.aspects = AspectSet(names);
  c.num_classes = dims.num_classes;
  c.s_max = dims.s_max;
  c.t_max = dims.t_max;
  c.vocab_size = dims.vocab_size;
  return c;
}

// Three real sentences of lengths 4, 1 and 6 over ids in [2, vocab).
inline ReviewDocument toy_document(const ToyDims& dims = {}, std::uint64_t seed = 3) {
  Rng rng(seed);
  ReviewDocument doc;
  doc.doc_id = "toy";
  for (std::size_t len : {4, 1, 6}) {
    std::vector<int> ids;
    std::vector<std::string> toks;
    for (std::size_t t = 0; t < len; ++t) {
      ids.push_back(static_cast<int>(2 + rng.index(dims.vocab_size - 2)));
      toks.push_back("w" + std::to_string(ids.back()));
    }
    doc.token_ids.push_back(ids);
    doc.tokens.push_back(toks);
  }
  doc.overall_rating = 2;
  for (std::size_t j = 0; j < dims.num_aspects; ++j) doc.aspect_ratings.push_back(static_cast<double>(1 + j % dims.num_classes));
  return doc;
}

inline CheckOutcome run_model_case(Variant variant, EncoderKind kind, const SelftestOptions& options,
                                   const ToyDims& dims = {}, std::uint64_t seed = 17) {
  const std::string name = to_string(kind) + "+" + to_string(variant);
  CheckOutcome outcome;
  outcome.name = name;
  try {
    SaamModel model(toy_model_config(variant, kind, dims), seed);
    // Random non-zero biases so every parameter is exercised away from init.
    Rng rng(seed + 1);
    for (auto& e : model.params().entries())
      if (e.name.ends_with("bias"))
        for (double& v : e.tensor.mutable_data()) v = rng.uniform(-0.5, 0.5);
    const std::vector<ReviewDocument> docs{toy_document(dims)};
    const PaddedBatch batch = make_batch(docs, dims.s_max, dims.t_max);
    const RatingTargets y = RatingTargets::of(docs[0]);
    const bool corrupt = name == options.corrupt_check;
    const double factor = options.corrupt_factor;
    auto build = [&](Graph& g) {
      const ModelOutput out = model.forward(g, batch.document(0));
      HeadOutput head = out.head;
      if (corrupt) head.overall = corrupt_gradient(g, head.overall, factor);
      return head_loss(g, head, y);
    };
    const auto report = grad_check(build, model.params().entries(), options.grad);
    outcome.passed = report.passed;
    outcome.detail = report.summary();
  } catch (const std::exception& e) {
    outcome.passed = false;
    outcome.detail = std::string("error: ") + e.what();
  }
  return outcome;
}

// Oracle agreement of the graph heads with the loop references.
inline CheckOutcome run_head_oracle(Variant variant, std::size_t instances, std::uint64_t seed = 23,
                                    double tolerance = 1e-12) {
  CheckOutcome outcome;
  outcome.name = "oracle:" + to_string(variant);
  Rng rng(seed);
  double worst = 0.0;
  try {
    for (std::size_t n = 0; n < instances; ++n) {
      HeadConfig cfg;
      cfg.variant = variant;
      cfg.num_aspects = 1 + rng.index(4);
      cfg.num_classes = 2 + rng.index(4);
      cfg.s_max = 1 + rng.index(6);
      cfg.feature_dim = 1 + rng.index(8);
      const std::size_t real = 1 + rng.index(cfg.s_max);
      auto h = random_head_instance(cfg, rng, cfg.s_max, real, true);
      Graph g;
      const HeadOutput out = head_forward(g, cfg, h.params, h.u);
      const ReferenceOutput ref = reference_head(cfg, h.params, h.u);
      auto cmp = [&worst](const std::vector<double>& a, const std::vector<double>& b) {
        if (a.size() != b.size()) throw DimensionError("oracle output size mismatch");
        for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
      };
      cmp(out.overall.values(), ref.overall);
      for (std::size_t j = 0; j < cfg.num_aspects; ++j) cmp(out.aspects[j].values(), ref.aspects[j]);
      for (std::size_t k = 0; k < ref.aspect_dist.size(); ++k) cmp(out.aspect_dist[k].values(), ref.aspect_dist[k]);
    }
    outcome.passed = worst <= tolerance;
    std::ostringstream os;
    os << (outcome.passed ? "pass" : "FAIL") << " max_abs_diff=" << worst << " instances=" << instances;
    outcome.detail = os.str();
  } catch (const std::exception& e) {
    outcome.passed = false;
    outcome.detail = std::string("error: ") + e.what();
  }
  return outcome;
}

inline std::vector<std::pair<EncoderKind, Variant>> model_combinations() {
  return {{EncoderKind::kCnn, Variant::kC1}, {EncoderKind::kCnn, Variant::kC2}, {EncoderKind::kCnn, Variant::kR},
          {EncoderKind::kGru, Variant::kC1}, {EncoderKind::kGru, Variant::kC2}, {EncoderKind::kGru, Variant::kR},
          {EncoderKind::kMean, Variant::kR}, {EncoderKind::kMean, Variant::kFlatC}, {EncoderKind::kMean, Variant::kFlatR}};
}

inline SelftestReport run_selftest(const SelftestOptions& options = {}) {
  const auto start = std::chrono::steady_clock::now();
  SelftestReport report;
  for (auto& c : op_cases()) report.checks.push_back(run_grad_case(c, options));
  for (const auto& [kind, variant] : model_combinations()) report.checks.push_back(run_model_case(variant, kind, options));
  for (Variant v : {Variant::kC1, Variant::kC2, Variant::kR}) report.checks.push_back(run_head_oracle(v, 100));
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

inline std::string render_selftest(const SelftestReport& r) {
  std::ostringstream os;
  for (const auto& c : r.checks) os << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << "  " << c.detail << "\n";
  os << (r.passed() ? "selftest passed" : "selftest FAILED") << " (" << r.checks.size() << " checks, " << r.seconds
     << " s)\n";
  return os.str();
}

}  // namespace saam::selftest
