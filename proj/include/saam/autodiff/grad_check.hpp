#pragma once

// Central-difference verification of analytic gradients.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "saam/autodiff/parameters.hpp"
#include "saam/autodiff/tensor.hpp"
#include "saam/rng.hpp"

namespace saam {

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  // Tensors larger than this are probed on a seeded sample of this many elements.
  std::size_t max_elements_per_tensor = 128;
  std::uint64_t seed = 7;
  // Relative error is |a - n| / max(|a|, |n|, floor). The floor keeps
  // gradients that are ~0 from turning finite-difference round-off into
  // huge relative errors.
  double denominator_floor = 1e-4;
};

struct TensorGradReport {
  std::string name;
  std::size_t checked = 0;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct GradCheckReport {
  std::vector<TensorGradReport> tensors;
  double max_rel_error = 0.0;
  std::string worst_tensor;
  bool passed = true;

  std::string summary() const {
    std::ostringstream os;
    os << (passed ? "pass" : "FAIL") << " max_rel_error=" << max_rel_error;
    if (!worst_tensor.empty()) os << " worst=" << worst_tensor;
    return os.str();
  }
};

using LossBuilder = std::function<Tensor(Graph&)>;

inline GradCheckReport grad_check(const LossBuilder& build, std::span<NamedTensor> params,
                                  const GradCheckOptions& options = {}) {
  for (auto& p : params) {
    p.tensor.set_requires_grad(true);
    p.tensor.zero_grad();
  }
  {
    Graph g;
    Tensor loss = build(g);
    g.backward(loss);
  }
  auto evaluate = [&build]() {
    Graph g;
    const double v = build(g).item();
    if (!std::isfinite(v)) throw NumericError("grad_check: non-finite loss while probing");
    return v;
  };

  Rng rng(options.seed);
  GradCheckReport report;
  for (auto& p : params) {
    TensorGradReport tr;
    tr.name = p.name;
    const std::size_t n = p.tensor.numel();
    std::vector<std::size_t> indices(n);
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    if (n > options.max_elements_per_tensor) {
      rng.shuffle(std::span<std::size_t>(indices));
      indices.resize(options.max_elements_per_tensor);
      std::sort(indices.begin(), indices.end());
    }
    const std::vector<double> analytic(p.tensor.grad().begin(), p.tensor.grad().end());
    auto data = p.tensor.mutable_data();
    for (std::size_t idx : indices) {
      const double original = data[idx];
      data[idx] = original + options.step;
      const double plus = evaluate();
      data[idx] = original - options.step;
      const double minus = evaluate();
      data[idx] = original;
      const double numeric = (plus - minus) / (2.0 * options.step);
      const double a = analytic.empty() ? 0.0 : analytic[idx];
      const double denom = std::max({std::abs(a), std::abs(numeric), options.denominator_floor});
      const double rel = std::abs(a - numeric) / denom;
      if (rel > tr.max_rel_error || tr.checked == 0) {
        tr.max_rel_error = rel;
        tr.worst_index = idx;
        tr.analytic = a;
        tr.numeric = numeric;
      }
      ++tr.checked;
    }
    if (tr.max_rel_error > report.max_rel_error || report.worst_tensor.empty()) {
      report.max_rel_error = tr.max_rel_error;
      report.worst_tensor = tr.name;
    }
    report.tensors.push_back(std::move(tr));
  }
  report.passed = report.max_rel_error < options.tolerance;
  return report;
}

}  // namespace saam
