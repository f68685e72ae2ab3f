#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "saam/autodiff/grad_check.hpp"
#include "saam/autodiff/ops.hpp"
#include "saam/autodiff/parameters.hpp"
#include "saam/selftest.hpp"

using namespace saam;

namespace {

std::vector<double> vals(const Tensor& t) { return t.values(); }

}  // namespace

TEST(Tensor, DataLengthMustMatchShape) {
  EXPECT_THROW(Tensor::from({2, 3}, {1, 2, 3}), DimensionError);
  const Tensor t = Tensor::matrix(2, 2, {1, 2, 3, 4});
  EXPECT_EQ(t.numel(), 4u);
  EXPECT_DOUBLE_EQ(t.at(1, 0), 3.0);
}

TEST(Matmul, Examples) {
  Graph g;
  EXPECT_EQ(vals(ops::matmul(g, Tensor::matrix(2, 2, {1, 0, 0, 1}), Tensor::matrix(2, 1, {3, 4}))),
            (std::vector<double>{3, 4}));
  EXPECT_EQ(vals(ops::matmul(g, Tensor::matrix(1, 2, {1, 2}), Tensor::matrix(2, 1, {0, 0}))), (std::vector<double>{0}));
  const Tensor r = ops::matmul(g, Tensor::matrix(2, 2, {1, 2, 3, 4}), Tensor::matrix(2, 2, {5, 6, 7, 8}));
  EXPECT_EQ(vals(r), (std::vector<double>{19, 22, 43, 50}));
  EXPECT_EQ(r.shape(), (Shape{2, 2}));
}

TEST(Matmul, ShapeMismatchNamesBothShapes) {
  Graph g;
  try {
    ops::matmul(g, Tensor::zeros({2, 3}), Tensor::zeros({2, 3}));
    FAIL();
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[2x3] x [2x3]"), std::string::npos) << msg;
  }
}

TEST(Softmax, Examples) {
  Graph g;
  for (double v : vals(ops::softmax_lastdim(g, Tensor::vector({0, 0, 0})))) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
  const auto big = vals(ops::softmax_lastdim(g, Tensor::vector({1000, 0, 0})));
  EXPECT_NEAR(big[0], 1.0, 1e-12);
  EXPECT_NEAR(big[1], 0.0, 1e-12);
  const auto s = vals(ops::softmax_lastdim(g, Tensor::vector({1, 2, 3})));
  EXPECT_NEAR(s[0], 0.09003, 1e-5);
  EXPECT_NEAR(s[1], 0.24473, 1e-5);
  EXPECT_NEAR(s[2], 0.66524, 1e-5);
}

TEST(Softmax, EmptyIsDimensionError) {
  Graph g;
  EXPECT_THROW(ops::softmax_lastdim(g, Tensor::zeros({0})), DimensionError);
}

TEST(Softmax, RowsSumToOneProperty) {
  Rng rng(4);
  for (int n = 0; n < 200; ++n) {
    const std::size_t rows = 1 + rng.index(4), cols = 1 + rng.index(7);
    std::vector<double> x(rows * cols);
    for (double& v : x) v = rng.uniform(-50, 50);
    Graph g;
    const Tensor s = ops::softmax_lastdim(g, Tensor::matrix(rows, cols, x));
    for (std::size_t r = 0; r < rows; ++r) {
      double total = 0.0;
      for (std::size_t c = 0; c < cols; ++c) {
        EXPECT_GE(s.at(r, c), 0.0);
        EXPECT_LE(s.at(r, c), 1.0);
        total += s.at(r, c);
      }
      EXPECT_NEAR(total, 1.0, 1e-9);
    }
  }
}

TEST(Outer, Examples) {
  Graph g;
  EXPECT_EQ(vals(ops::outer(g, Tensor::vector({1, 0}), Tensor::vector({2, 3, 4}))),
            (std::vector<double>{2, 3, 4, 0, 0, 0}));
  EXPECT_EQ(vals(ops::outer(g, Tensor::vector({0.5, 0.5}), Tensor::vector({2, 4}))), (std::vector<double>{1, 2, 1, 2}));
  const Tensor s = ops::outer(g, Tensor::vector({1}), Tensor::vector({7}));
  EXPECT_EQ(s.shape(), (Shape{1, 1}));
  EXPECT_EQ(s[0], 7.0);
  EXPECT_THROW(ops::outer(g, Tensor::zeros({2, 2}), Tensor::vector({1})), DimensionError);
}

TEST(Outer, ColumnSumEqualsScaledVector) {
  Rng rng(9);
  for (int n = 0; n < 50; ++n) {
    std::vector<double> u(4), v(3);
    for (double& x : u) x = rng.uniform(-2, 2);
    for (double& x : v) x = rng.uniform(-2, 2);
    Graph g;
    const Tensor s = ops::sum(g, ops::outer(g, Tensor::vector(u), Tensor::vector(v)), 0);
    const double su = u[0] + u[1] + u[2] + u[3];
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(s[j], su * v[j], 1e-12);
  }
}

TEST(Elementwise, Examples) {
  Graph g;
  EXPECT_DOUBLE_EQ(ops::sigmoid(g, Tensor::scalar(0)).item(), 0.5);
  EXPECT_DOUBLE_EQ(ops::tanh(g, Tensor::scalar(0)).item(), 0.0);
  EXPECT_EQ(vals(ops::add(g, Tensor::vector({1, 2}), Tensor::vector({3, 4}))), (std::vector<double>{4, 6}));
  EXPECT_EQ(vals(ops::relu(g, Tensor::vector({-1, 2}))), (std::vector<double>{0, 2}));
  EXPECT_EQ(vals(ops::scale(g, Tensor::vector({1, -2}), 3)), (std::vector<double>{3, -6}));
  EXPECT_EQ(vals(ops::mul(g, Tensor::scalar(2), Tensor::vector({1, 3}))), (std::vector<double>{2, 6}));
}

TEST(Elementwise, Errors) {
  Graph g;
  EXPECT_THROW(ops::add(g, Tensor::vector({1, 2}), Tensor::vector({1, 2, 3})), DimensionError);
  EXPECT_THROW(ops::div(g, Tensor::vector({1, 2}), Tensor::vector({1, 0})), NumericError);
}

TEST(Elementwise, NonFiniteOutputIsRejected) {
  Graph g;
  EXPECT_THROW(ops::scale(g, Tensor::vector({1e308}), 10.0), NumericError);
}

TEST(Reduce, Examples) {
  Graph g;
  EXPECT_EQ(vals(ops::sum(g, Tensor::matrix(2, 2, {1, 2, 3, 4}), 0)), (std::vector<double>{4, 6}));
  EXPECT_EQ(vals(ops::max_over_axis(g, Tensor::matrix(2, 2, {1, 5, 2, 3}), 0)), (std::vector<double>{2, 5}));
  EXPECT_DOUBLE_EQ(ops::mean(g, Tensor::vector({2, 4, 6}), 0).item(), 4.0);
  EXPECT_THROW(ops::sum(g, Tensor::vector({1}), 1), DimensionError);
}

TEST(Reduce, MaxTieRoutesGradientToFirstOccurrence) {
  Tensor x = Tensor::matrix(3, 1, {2, 2, 1}, true);
  Graph g;
  g.backward(ops::sum_all(g, ops::max_over_axis(g, x, 0)));
  EXPECT_EQ(std::vector<double>(x.grad().begin(), x.grad().end()), (std::vector<double>{1, 0, 0}));
}

TEST(Embedding, Examples) {
  Graph g;
  const Tensor table = Tensor::matrix(2, 2, {1, 1, 2, 2});
  const std::vector<int> ids{1, 0, 1};
  EXPECT_EQ(vals(ops::embedding_lookup(g, table, ids)), (std::vector<double>{2, 2, 1, 1, 2, 2}));
  const Tensor empty = ops::embedding_lookup(g, table, std::vector<int>{});
  EXPECT_EQ(empty.shape(), (Shape{0, 2}));
}

TEST(Embedding, DuplicateIdsScatterAdd) {
  Tensor table = Tensor::matrix(3, 2, {0, 0, 0, 0, 0, 0}, true);
  const std::vector<int> ids{2, 0, 2};
  Graph g;
  const Tensor out = ops::embedding_lookup(g, table, ids);
  const Tensor w = Tensor::matrix(3, 2, {1, 2, 3, 4, 5, 6});
  g.backward(ops::dot(g, out, w));
  EXPECT_EQ(std::vector<double>(table.grad().begin(), table.grad().end()), (std::vector<double>{3, 4, 0, 0, 6, 8}));
}

TEST(Embedding, OutOfRangeIdIsNamed) {
  Graph g;
  try {
    ops::embedding_lookup(g, Tensor::zeros({2, 2}), std::vector<int>{0, 7});
    FAIL();
  } catch (const IndexError& e) {
    EXPECT_NE(std::string(e.what()).find("7"), std::string::npos);
  }
}

TEST(CrossEntropy, Examples) {
  Graph g;
  EXPECT_NEAR(ops::cross_entropy(g, Tensor::vector({0, 1, 0}), 1).item(), 0.0, 1e-15);
  EXPECT_NEAR(ops::cross_entropy(g, Tensor::vector({0.2, 0.2, 0.2, 0.2, 0.2}), 3).item(), std::log(5.0), 1e-12);
  EXPECT_NEAR(ops::cross_entropy(g, Tensor::vector({0.7, 0.3}), 1).item(), 1.20397, 1e-5);
  EXPECT_THROW(ops::cross_entropy(g, Tensor::vector({0.7, 0.3}), 2), IndexError);
  EXPECT_THROW(ops::cross_entropy(g, Tensor::vector({0.7, 0.7}), 0), NumericError);
}

TEST(CrossEntropy, ClampsZeroProbability) {
  Graph g;
  EXPECT_NEAR(ops::cross_entropy(g, Tensor::vector({1, 0}), 1).item(), -std::log(1e-12), 1e-9);
}

TEST(SquaredError, Examples) {
  Graph g;
  EXPECT_EQ(ops::squared_error(g, Tensor::scalar(3), 3).item(), 0.0);
  EXPECT_EQ(ops::squared_error(g, Tensor::scalar(5), 1).item(), 16.0);
  EXPECT_EQ(ops::squared_error(g, Tensor::scalar(2.5), 4.0).item(), 2.25);
}

TEST(Backward, Identity) {
  Tensor x = Tensor::scalar(3, true);
  Graph g;
  g.backward(ops::scale(g, x, 1.0));
  EXPECT_EQ(x.grad()[0], 1.0);
}

TEST(Backward, SumOfSquares) {
  Tensor x = Tensor::vector({1, -2, 3}, true);
  Graph g;
  g.backward(ops::sum_all(g, ops::mul(g, x, x)));
  EXPECT_EQ(std::vector<double>(x.grad().begin(), x.grad().end()), (std::vector<double>{2, -4, 6}));
}

TEST(Backward, TwoConsumersAccumulate) {
  // f = sum(tanh(x)) + sum(3x); df/dx = (1 - tanh^2) + 3
  Tensor x = Tensor::vector({0.2, -0.4}, true);
  Graph g;
  const Tensor a = ops::sum_all(g, ops::tanh(g, x));
  const Tensor b = ops::sum_all(g, ops::scale(g, x, 3.0));
  g.backward(ops::add(g, a, b));
  for (std::size_t i = 0; i < 2; ++i) {
    const double t = std::tanh(x[i]);
    EXPECT_NEAR(x.grad()[i], (1 - t * t) + 3.0, 1e-15);
  }
}

TEST(Backward, NonScalarLossRejected) {
  Graph g;
  const Tensor v = ops::scale(g, Tensor::vector({1, 2}, true), 1.0);
  EXPECT_THROW(g.backward(v), DimensionError);
}

TEST(Graph, TapeIsTopologicallyOrdered) {
  Tensor x = Tensor::vector({1, 2}, true);
  Graph g;
  const Tensor a = ops::tanh(g, x);
  const Tensor b = ops::mul(g, a, x);
  const Tensor c = ops::sum_all(g, b);
  EXPECT_EQ(g.size(), 3u);
  EXPECT_LT(a.node_id(), b.node_id());
  EXPECT_LT(b.node_id(), c.node_id());
  EXPECT_EQ(g.at(0).op, "tanh");
  EXPECT_EQ(g.at(2).op, "sum_all");
}

TEST(GradCheck, LinearFunctionIsExact) {
  std::vector<NamedTensor> params{{"x", Tensor::vector({0.3, -1.2, 2.0})}};
  const Tensor w = Tensor::vector({1.5, -2.0, 0.25});
  const auto report = grad_check([&](Graph& g) { return ops::dot(g, params[0].tensor, w); }, params);
  EXPECT_TRUE(report.passed);
  EXPECT_LT(report.max_rel_error, 1e-8);
}

TEST(GradCheck, SoftmaxCrossEntropyComposite) {
  std::vector<NamedTensor> params{{"logits", Tensor::vector({0.1, -0.3, 0.8, 0.2})}};
  const auto report = grad_check(
      [&](Graph& g) { return ops::cross_entropy(g, ops::softmax_lastdim(g, params[0].tensor), 2); }, params);
  EXPECT_TRUE(report.passed) << report.summary();
}

TEST(GradCheck, CorruptedBackwardFailsNamingTensor) {
  std::vector<NamedTensor> params{{"victim", Tensor::vector({0.5, -0.5})}};
  const auto report = grad_check(
      [&](Graph& g) { return ops::sum_all(g, selftest::corrupt_gradient(g, ops::tanh(g, params[0].tensor), 1.3)); },
      params);
  EXPECT_FALSE(report.passed);
  EXPECT_EQ(report.worst_tensor, "victim");
}

TEST(GradCheck, SamplesLargeTensors) {
  std::vector<NamedTensor> params{{"big", Tensor::zeros({20, 20})}};
  GradCheckOptions opts;
  const auto report = grad_check([&](Graph& g) { return ops::sum_all(g, ops::tanh(g, params[0].tensor)); }, params, opts);
  EXPECT_EQ(report.tensors[0].checked, opts.max_elements_per_tensor);
  EXPECT_TRUE(report.passed);
}

TEST(GradCheck, EveryOpPasses) {
  selftest::SelftestOptions opts;
  for (auto& c : selftest::op_cases()) {
    const auto outcome = selftest::run_grad_case(c, opts);
    EXPECT_TRUE(outcome.passed) << c.name << ": " << outcome.detail;
  }
}

TEST(ParameterStore, RejectsDuplicatesAndRestores) {
  ParameterStore store;
  Rng rng(1);
  store.add_glorot("w", {3, 2}, 3, 2, rng);
  EXPECT_THROW(store.add_zeros("w", {1}), ConfigError);
  const double limit = std::sqrt(6.0 / 5.0);
  for (double v : store.get("w").data()) EXPECT_LE(std::abs(v), limit);
  const auto snap = store.snapshot();
  store.get("w").mutable_data()[0] = 42.0;
  store.restore(snap);
  EXPECT_EQ(store.get("w")[0], snap[0][0]);
}
