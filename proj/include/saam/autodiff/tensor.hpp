#pragma once

// Dense row-major tensors and the tape that records operations on them.
//
// A Tensor is a cheap handle to a shared node. Leaves (parameters, inputs,
// constants) live outside any graph; every op output is appended to the
// Graph that produced it, so the tape order is a topological order and
// backward() simply replays it in reverse.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "saam/errors.hpp"

namespace saam {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

struct TensorNode {
  static constexpr std::size_t kLeaf = std::numeric_limits<std::size_t>::max();

  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty until something flows into it
  bool requires_grad = false;
  std::size_t node_id = kLeaf;
  std::string op = "leaf";
  std::function<void(TensorNode&)> backward_fn;

  void ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
  }
};

class Tensor {
 public:
  Tensor() = default;

  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false) {
    if (values.size() != shape_numel(shape)) {
      throw DimensionError("tensor data length " + std::to_string(values.size()) +
                           " does not match shape " + shape_str(shape));
    }
    auto node = std::make_shared<TensorNode>();
    node->shape = std::move(shape);
    node->data = std::move(values);
    node->requires_grad = requires_grad;
    return Tensor(std::move(node));
  }

  static Tensor zeros(Shape shape, bool requires_grad = false) {
    std::vector<double> values(shape_numel(shape), 0.0);
    return from(std::move(shape), std::move(values), requires_grad);
  }

  static Tensor scalar(double value, bool requires_grad = false) {
    return from({}, {value}, requires_grad);
  }

  static Tensor vector(std::vector<double> values, bool requires_grad = false) {
    Shape shape{values.size()};
    return from(std::move(shape), std::move(values), requires_grad);
  }

  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                       bool requires_grad = false) {
    return from({rows, cols}, std::move(values), requires_grad);
  }

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t numel() const { return node_->data.size(); }
  std::size_t dim(std::size_t axis) const { return node_->shape.at(axis); }

  std::span<const double> data() const { return node_->data; }
  std::span<double> mutable_data() { return node_->data; }
  std::span<const double> grad() const { return node_->grad; }
  std::span<double> mutable_grad() {
    node_->ensure_grad();
    return node_->grad;
  }
  bool has_grad() const { return node_->grad.size() == node_->data.size(); }
  void zero_grad() { node_->grad.assign(node_->data.size(), 0.0); }

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool flag) { node_->requires_grad = flag; }
  std::size_t node_id() const { return node_->node_id; }
  const std::string& op() const { return node_->op; }

  double item() const {
    if (numel() != 1) throw DimensionError("item() on tensor of shape " + shape_str(shape()));
    return node_->data[0];
  }
  double operator[](std::size_t i) const { return node_->data[i]; }
  double at(std::size_t r, std::size_t c) const { return node_->data[r * shape().back() + c]; }

  std::vector<double> values() const { return node_->data; }

  // Deep copy of the value, detached from any graph.
  Tensor clone(bool requires_grad = false) const { return from(shape(), node_->data, requires_grad); }

  TensorNode& node() const { return *node_; }
  const std::shared_ptr<TensorNode>& node_ptr() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<TensorNode> node) : node_(std::move(node)) {}
  friend class Graph;

  std::shared_ptr<TensorNode> node_;
};

class Graph {
 public:
  // Records an op result. `backward` receives the output node (with grad
  // populated) and accumulates into the inputs it captured.
  Tensor record(std::string op, Shape shape, std::vector<double> values,
                std::initializer_list<const Tensor*> inputs,
                std::function<void(TensorNode&)> backward) {
    bool needs_grad = false;
    for (const Tensor* in : inputs) needs_grad = needs_grad || in->requires_grad();
    return record_impl(std::move(op), std::move(shape), std::move(values), needs_grad,
                       std::move(backward));
  }

  Tensor record(std::string op, Shape shape, std::vector<double> values,
                std::span<const Tensor> inputs, std::function<void(TensorNode&)> backward) {
    bool needs_grad = false;
    for (const Tensor& in : inputs) needs_grad = needs_grad || in.requires_grad();
    return record_impl(std::move(op), std::move(shape), std::move(values), needs_grad,
                       std::move(backward));
  }

  // Seeds d(loss)/d(loss) = 1 and replays the tape in reverse. Gradients
  // accumulate into leaves, so callers zero parameter grads between steps.
  void backward(const Tensor& loss) {
    if (loss.numel() != 1) {
      throw DimensionError("backward() needs a scalar loss, got shape " + shape_str(loss.shape()));
    }
    TensorNode& root = loss.node();
    if (!root.requires_grad) return;
    root.ensure_grad();
    root.grad[0] += 1.0;
    for (auto it = tape_.rbegin(); it != tape_.rend(); ++it) {
      TensorNode& node = **it;
      if (node.grad.empty() || !node.backward_fn) continue;
      node.backward_fn(node);
    }
  }

  std::size_t size() const { return tape_.size(); }
  const TensorNode& at(std::size_t i) const { return *tape_.at(i); }

  // Rejects non-finite outputs; any forward op goes through this.
  static void check_finite(const std::string& op, std::span<const double> values) {
    for (double v : values) {
      if (!std::isfinite(v)) throw NumericError(op + " produced a non-finite value");
    }
  }

 private:
  Tensor record_impl(std::string op, Shape shape, std::vector<double> values, bool needs_grad,
                     std::function<void(TensorNode&)> backward) {
    check_finite(op, values);
    Tensor out = Tensor::from(std::move(shape), std::move(values), needs_grad);
    TensorNode& node = out.node();
    node.op = std::move(op);
    node.node_id = tape_.size();
    if (needs_grad) node.backward_fn = std::move(backward);
    tape_.push_back(out.node_ptr());
    return out;
  }

  std::vector<std::shared_ptr<TensorNode>> tape_;
};

}  // namespace saam
