#pragma once

// Differentiable operations over Tensor. Every function records its result
// on the given Graph together with the rule that pushes gradients back.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "saam/autodiff/tensor.hpp"

namespace saam::ops {

namespace detail {

inline void require_rank(const Tensor& t, std::size_t rank, const char* op) {
  if (t.rank() != rank) {
    throw DimensionError(std::string(op) + " expects rank " + std::to_string(rank) +
                         ", got shape " + shape_str(t.shape()));
  }
}

inline std::shared_ptr<TensorNode> grad_target(const Tensor& t) {
  return t.requires_grad() ? t.node_ptr() : nullptr;
}

enum class Broadcast { kNone, kLeftScalar, kRightScalar };

inline Broadcast broadcast_mode(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() == b.shape()) return Broadcast::kNone;
  if (b.numel() == 1) return Broadcast::kRightScalar;
  if (a.numel() == 1) return Broadcast::kLeftScalar;
  throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                       shape_str(b.shape()));
}

// Pointwise binary op with optional scalar broadcast. `da`/`db` return the
// local partial derivatives at (x, y).
template <class Fwd, class DA, class DB>
Tensor binary(Graph& g, const char* op, const Tensor& a, const Tensor& b, Fwd fwd, DA da, DB db) {
  const Broadcast mode = broadcast_mode(a, b, op);
  const Shape out_shape = mode == Broadcast::kLeftScalar ? b.shape() : a.shape();
  const std::size_t n = shape_numel(out_shape);
  auto ia = [mode](std::size_t i) { return mode == Broadcast::kLeftScalar ? 0 : i; };
  auto ib = [mode](std::size_t i) { return mode == Broadcast::kRightScalar ? 0 : i; };
  std::vector<double> out(n);
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t i = 0; i < n; ++i) out[i] = fwd(x[ia(i)], y[ib(i)]);
  auto na = a.node_ptr();
  auto nb = b.node_ptr();
  auto ga = grad_target(a);
  auto gb = grad_target(b);
  return g.record(op, out_shape, std::move(out), {&a, &b},
                  [na, nb, ga, gb, ia, ib, da, db](TensorNode& self) {
                    const auto& x = na->data;
                    const auto& y = nb->data;
                    if (ga) ga->ensure_grad();
                    if (gb) gb->ensure_grad();
                    for (std::size_t i = 0; i < self.grad.size(); ++i) {
                      const double up = self.grad[i];
                      const double xv = x[ia(i)];
                      const double yv = y[ib(i)];
                      if (ga) ga->grad[ia(i)] += up * da(xv, yv);
                      if (gb) gb->grad[ib(i)] += up * db(xv, yv);
                    }
                  });
}

// Pointwise unary op; `deriv` receives (input, output).
template <class Fwd, class Deriv>
Tensor unary(Graph& g, const char* op, const Tensor& a, Fwd fwd, Deriv deriv) {
  const auto x = a.data();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = fwd(x[i]);
  auto na = a.node_ptr();
  auto ga = grad_target(a);
  return g.record(op, a.shape(), std::move(out), {&a}, [na, ga, deriv](TensorNode& self) {
    if (!ga) return;
    ga->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      ga->grad[i] += self.grad[i] * deriv(na->data[i], self.data[i]);
    }
  });
}

// Splits a shape around `axis` into (outer, axis length, inner) extents.
struct AxisView {
  std::size_t outer = 1, length = 1, inner = 1;
};

inline AxisView axis_view(const Shape& shape, std::size_t axis) {
  AxisView v;
  for (std::size_t i = 0; i < axis; ++i) v.outer *= shape[i];
  v.length = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) v.inner *= shape[i];
  return v;
}

inline Shape drop_axis(const Shape& shape, std::size_t axis) {
  Shape out;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i != axis) out.push_back(shape[i]);
  }
  return out;
}

inline void check_axis(const Tensor& x, std::size_t axis, const char* op) {
  if (axis >= x.rank()) {
    throw DimensionError(std::string(op) + ": axis " + std::to_string(axis) +
                         " out of range for shape " + shape_str(x.shape()));
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Linear algebra

inline Tensor matmul(Graph& g, const Tensor& a, const Tensor& b) {
  detail::require_rank(a, 2, "matmul");
  detail::require_rank(b, 2, "matmul");
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    throw DimensionError("matmul: inner dimensions differ, " + shape_str(a.shape()) + " x " +
                         shape_str(b.shape()));
  }
  std::vector<double> out(m * n, 0.0);
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t p = 0; p < k; ++p) {
      const double xv = x[i * k + p];
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += xv * y[p * n + j];
    }
  auto na = a.node_ptr();
  auto nb = b.node_ptr();
  auto ga = detail::grad_target(a);
  auto gb = detail::grad_target(b);
  return g.record("matmul", {m, n}, std::move(out), {&a, &b},
                  [na, nb, ga, gb, m, k, n](TensorNode& self) {
                    const auto& up = self.grad;
                    if (ga) {
                      ga->ensure_grad();
                      for (std::size_t i = 0; i < m; ++i)
                        for (std::size_t p = 0; p < k; ++p) {
                          double acc = 0.0;
                          for (std::size_t j = 0; j < n; ++j) acc += up[i * n + j] * nb->data[p * n + j];
                          ga->grad[i * k + p] += acc;
                        }
                    }
                    if (gb) {
                      gb->ensure_grad();
                      for (std::size_t i = 0; i < m; ++i)
                        for (std::size_t p = 0; p < k; ++p) {
                          const double xv = na->data[i * k + p];
                          for (std::size_t j = 0; j < n; ++j) gb->grad[p * n + j] += xv * up[i * n + j];
                        }
                    }
                  });
}

// x·W + b for x of shape [d] or [n, d], W of shape [d, o], b of shape [o]
// (b may be undefined). Fused so per-sentence layers stay cheap.
inline Tensor affine(Graph& g, const Tensor& x, const Tensor& w, const Tensor& b) {
  detail::require_rank(w, 2, "affine");
  if (x.rank() != 1 && x.rank() != 2) {
    throw DimensionError("affine expects rank-1 or rank-2 input, got " + shape_str(x.shape()));
  }
  const std::size_t rows = x.rank() == 1 ? 1 : x.dim(0);
  const std::size_t d = x.shape().back();
  const std::size_t o = w.dim(1);
  if (w.dim(0) != d) {
    throw DimensionError("affine: input " + shape_str(x.shape()) + " incompatible with weight " +
                         shape_str(w.shape()));
  }
  const bool has_bias = b.defined();
  if (has_bias && (b.rank() != 1 || b.dim(0) != o)) {
    throw DimensionError("affine: bias " + shape_str(b.shape()) + " incompatible with weight " +
                         shape_str(w.shape()));
  }
  std::vector<double> out(rows * o, 0.0);
  const auto xv = x.data();
  const auto wv = w.data();
  for (std::size_t r = 0; r < rows; ++r) {
    double* dst = out.data() + r * o;
    if (has_bias) std::copy(b.data().begin(), b.data().end(), dst);
    for (std::size_t p = 0; p < d; ++p) {
      const double s = xv[r * d + p];
      const double* wrow = wv.data() + p * o;
      for (std::size_t j = 0; j < o; ++j) dst[j] += s * wrow[j];
    }
  }
  Shape shape = x.rank() == 1 ? Shape{o} : Shape{rows, o};
  auto nx = x.node_ptr();
  auto nw = w.node_ptr();
  auto gx = detail::grad_target(x);
  auto gw = detail::grad_target(w);
  auto gb = has_bias ? detail::grad_target(b) : nullptr;
  Tensor bias_or_x = has_bias ? b : x;
  return g.record("affine", std::move(shape), std::move(out), {&x, &w, &bias_or_x},
                  [nx, nw, gx, gw, gb, rows, d, o](TensorNode& self) {
                    const auto& up = self.grad;
                    if (gx) gx->ensure_grad();
                    if (gw) gw->ensure_grad();
                    if (gb) gb->ensure_grad();
                    for (std::size_t r = 0; r < rows; ++r) {
                      const double* u = up.data() + r * o;
                      if (gb)
                        for (std::size_t j = 0; j < o; ++j) gb->grad[j] += u[j];
                      for (std::size_t p = 0; p < d; ++p) {
                        const double* wrow = nw->data.data() + p * o;
                        if (gx) {
                          double acc = 0.0;
                          for (std::size_t j = 0; j < o; ++j) acc += u[j] * wrow[j];
                          gx->grad[r * d + p] += acc;
                        }
                        if (gw) {
                          const double s = nx->data[r * d + p];
                          double* gwrow = gw->grad.data() + p * o;
                          for (std::size_t j = 0; j < o; ++j) gwrow[j] += s * u[j];
                        }
                      }
                    }
                  });
}

inline Tensor outer(Graph& g, const Tensor& u, const Tensor& v) {
  if (u.rank() != 1 || v.rank() != 1) {
    throw DimensionError("outer expects two rank-1 tensors, got " + shape_str(u.shape()) + " and " +
                         shape_str(v.shape()));
  }
  const std::size_t p = u.dim(0), q = v.dim(0);
  std::vector<double> out(p * q);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j) out[i * q + j] = u[i] * v[j];
  auto nu = u.node_ptr();
  auto nv = v.node_ptr();
  auto gu = detail::grad_target(u);
  auto gv = detail::grad_target(v);
  return g.record("outer", {p, q}, std::move(out), {&u, &v}, [nu, nv, gu, gv, p, q](TensorNode& self) {
    if (gu) gu->ensure_grad();
    if (gv) gv->ensure_grad();
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < q; ++j) {
        const double up = self.grad[i * q + j];
        if (gu) gu->grad[i] += up * nv->data[j];
        if (gv) gv->grad[j] += up * nu->data[i];
      }
  });
}

// ---------------------------------------------------------------------------
// Pointwise

inline Tensor add(Graph& g, const Tensor& a, const Tensor& b) {
  return detail::binary(
      g, "add", a, b, [](double x, double y) { return x + y; }, [](double, double) { return 1.0; },
      [](double, double) { return 1.0; });
}

inline Tensor sub(Graph& g, const Tensor& a, const Tensor& b) {
  return detail::binary(
      g, "sub", a, b, [](double x, double y) { return x - y; }, [](double, double) { return 1.0; },
      [](double, double) { return -1.0; });
}

inline Tensor mul(Graph& g, const Tensor& a, const Tensor& b) {
  return detail::binary(
      g, "mul", a, b, [](double x, double y) { return x * y; }, [](double, double y) { return y; },
      [](double x, double) { return x; });
}

inline Tensor div(Graph& g, const Tensor& a, const Tensor& b) {
  for (double v : b.data()) {
    if (v == 0.0) throw NumericError("div: division by zero");
  }
  return detail::binary(
      g, "div", a, b, [](double x, double y) { return x / y; },
      [](double, double y) { return 1.0 / y; }, [](double x, double y) { return -x / (y * y); });
}

inline Tensor scale(Graph& g, const Tensor& a, double factor) {
  return detail::unary(
      g, "scale", a, [factor](double x) { return x * factor; },
      [factor](double, double) { return factor; });
}

inline Tensor add_scalar(Graph& g, const Tensor& a, double c) {
  return detail::unary(
      g, "add_scalar", a, [c](double x) { return x + c; }, [](double, double) { return 1.0; });
}

inline Tensor tanh(Graph& g, const Tensor& a) {
  return detail::unary(
      g, "tanh", a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

inline Tensor sigmoid(Graph& g, const Tensor& a) {
  return detail::unary(
      g, "sigmoid", a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

inline Tensor relu(Graph& g, const Tensor& a) {
  return detail::unary(
      g, "relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

// Multiplies by a fixed (non-differentiable) mask, e.g. an inverted-dropout mask.
inline Tensor mask_multiply(Graph& g, const Tensor& a, std::vector<double> mask) {
  if (mask.size() != a.numel()) {
    throw DimensionError("mask_multiply: mask length " + std::to_string(mask.size()) +
                         " vs tensor " + shape_str(a.shape()));
  }
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * mask[i];
  auto ga = detail::grad_target(a);
  return g.record("mask_multiply", a.shape(), std::move(out), {&a},
                  [ga, mask = std::move(mask)](TensorNode& self) {
                    if (!ga) return;
                    ga->ensure_grad();
                    for (std::size_t i = 0; i < mask.size(); ++i) ga->grad[i] += self.grad[i] * mask[i];
                  });
}

// ---------------------------------------------------------------------------
// Normalization and reductions

inline Tensor softmax_lastdim(Graph& g, const Tensor& x) {
  if (x.rank() == 0 || x.numel() == 0 || x.shape().back() == 0) {
    throw DimensionError("softmax_lastdim on empty tensor " + shape_str(x.shape()));
  }
  const std::size_t n = x.shape().back();
  const std::size_t rows = x.numel() / n;
  const auto in = x.data();
  std::vector<double> out(x.numel());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* src = in.data() + r * n;
    double* dst = out.data() + r * n;
    const double mx = *std::max_element(src, src + n);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += dst[j] = std::exp(src[j] - mx);
    for (std::size_t j = 0; j < n; ++j) dst[j] /= total;
  }
  auto gx = detail::grad_target(x);
  return g.record("softmax", x.shape(), std::move(out), {&x}, [gx, rows, n](TensorNode& self) {
    if (!gx) return;
    gx->ensure_grad();
    for (std::size_t r = 0; r < rows; ++r) {
      const double* y = self.data.data() + r * n;
      const double* up = self.grad.data() + r * n;
      double dotp = 0.0;
      for (std::size_t j = 0; j < n; ++j) dotp += up[j] * y[j];
      for (std::size_t j = 0; j < n; ++j) gx->grad[r * n + j] += y[j] * (up[j] - dotp);
    }
  });
}

inline Tensor sum(Graph& g, const Tensor& x, std::size_t axis) {
  detail::check_axis(x, axis, "sum");
  const auto v = detail::axis_view(x.shape(), axis);
  std::vector<double> out(v.outer * v.inner, 0.0);
  const auto in = x.data();
  for (std::size_t o = 0; o < v.outer; ++o)
    for (std::size_t k = 0; k < v.length; ++k)
      for (std::size_t i = 0; i < v.inner; ++i)
        out[o * v.inner + i] += in[(o * v.length + k) * v.inner + i];
  auto gx = detail::grad_target(x);
  return g.record("sum", detail::drop_axis(x.shape(), axis), std::move(out), {&x}, [gx, v](TensorNode& self) {
    if (!gx) return;
    gx->ensure_grad();
    for (std::size_t o = 0; o < v.outer; ++o)
      for (std::size_t k = 0; k < v.length; ++k)
        for (std::size_t i = 0; i < v.inner; ++i)
          gx->grad[(o * v.length + k) * v.inner + i] += self.grad[o * v.inner + i];
  });
}

inline Tensor mean(Graph& g, const Tensor& x, std::size_t axis) {
  detail::check_axis(x, axis, "mean");
  if (x.dim(axis) == 0) throw DimensionError("mean over empty axis of " + shape_str(x.shape()));
  return scale(g, sum(g, x, axis), 1.0 / static_cast<double>(x.dim(axis)));
}

// Gradient goes to the first maximal element along the axis.
inline Tensor max_over_axis(Graph& g, const Tensor& x, std::size_t axis) {
  detail::check_axis(x, axis, "max_over_axis");
  const auto v = detail::axis_view(x.shape(), axis);
  if (v.length == 0) throw DimensionError("max_over_axis over empty axis of " + shape_str(x.shape()));
  std::vector<double> out(v.outer * v.inner);
  std::vector<std::size_t> argmax(v.outer * v.inner);
  const auto in = x.data();
  for (std::size_t o = 0; o < v.outer; ++o)
    for (std::size_t i = 0; i < v.inner; ++i) {
      std::size_t best = 0;
      double best_v = in[o * v.length * v.inner + i];
      for (std::size_t k = 1; k < v.length; ++k) {
        const double cand = in[(o * v.length + k) * v.inner + i];
        if (cand > best_v) {
          best_v = cand;
          best = k;
        }
      }
      out[o * v.inner + i] = best_v;
      argmax[o * v.inner + i] = (o * v.length + best) * v.inner + i;
    }
  auto gx = detail::grad_target(x);
  return g.record("max_over_axis", detail::drop_axis(x.shape(), axis), std::move(out), {&x},
                  [gx, argmax = std::move(argmax)](TensorNode& self) {
                    if (!gx) return;
                    gx->ensure_grad();
                    for (std::size_t i = 0; i < argmax.size(); ++i) gx->grad[argmax[i]] += self.grad[i];
                  });
}

inline Tensor sum_all(Graph& g, const Tensor& x) {
  double total = 0.0;
  for (double v : x.data()) total += v;
  auto gx = detail::grad_target(x);
  return g.record("sum_all", {}, {total}, {&x}, [gx](TensorNode& self) {
    if (!gx) return;
    gx->ensure_grad();
    for (double& v : gx->grad) v += self.grad[0];
  });
}

inline Tensor dot(Graph& g, const Tensor& a, const Tensor& b) { return sum_all(g, mul(g, a, b)); }

// ---------------------------------------------------------------------------
// Indexing and layout

inline Tensor embedding_lookup(Graph& g, const Tensor& table, std::span<const int> ids) {
  detail::require_rank(table, 2, "embedding_lookup");
  const std::size_t vocab = table.dim(0), e = table.dim(1);
  for (int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
      throw IndexError("embedding_lookup: id " + std::to_string(id) + " outside vocabulary of size " +
                       std::to_string(vocab));
    }
  }
  std::vector<double> out(ids.size() * e);
  const auto tv = table.data();
  for (std::size_t r = 0; r < ids.size(); ++r)
    std::copy_n(tv.begin() + static_cast<std::ptrdiff_t>(ids[r] * e), e, out.begin() + static_cast<std::ptrdiff_t>(r * e));
  auto gt = detail::grad_target(table);
  std::vector<int> kept(ids.begin(), ids.end());
  return g.record("embedding_lookup", {ids.size(), e}, std::move(out), {&table},
                  [gt, kept = std::move(kept), e](TensorNode& self) {
                    if (!gt) return;
                    gt->ensure_grad();
                    for (std::size_t r = 0; r < kept.size(); ++r)
                      for (std::size_t j = 0; j < e; ++j)
                        gt->grad[static_cast<std::size_t>(kept[r]) * e + j] += self.grad[r * e + j];
                  });
}

// Sub-tensor x[begin:end] along axis 0.
inline Tensor slice(Graph& g, const Tensor& x, std::size_t begin, std::size_t end) {
  if (x.rank() == 0 || begin > end || end > x.dim(0)) {
    throw DimensionError("slice [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") out of range for " + shape_str(x.shape()));
  }
  const std::size_t inner = x.rank() == 0 ? 1 : x.numel() / std::max<std::size_t>(x.dim(0), 1);
  Shape shape = x.shape();
  shape[0] = end - begin;
  std::vector<double> out(x.data().begin() + static_cast<std::ptrdiff_t>(begin * inner),
                          x.data().begin() + static_cast<std::ptrdiff_t>(end * inner));
  auto gx = detail::grad_target(x);
  return g.record("slice", std::move(shape), std::move(out), {&x}, [gx, begin, inner](TensorNode& self) {
    if (!gx) return;
    gx->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) gx->grad[begin * inner + i] += self.grad[i];
  });
}

// x[index] along axis 0, dropping that axis.
inline Tensor row(Graph& g, const Tensor& x, std::size_t index) {
  if (x.rank() == 0 || index >= x.dim(0)) {
    throw IndexError("row " + std::to_string(index) + " out of range for " + shape_str(x.shape()));
  }
  Shape shape(x.shape().begin() + 1, x.shape().end());
  const std::size_t n = shape_numel(shape);
  const std::size_t offset = index * n;
  std::vector<double> out(x.data().begin() + static_cast<std::ptrdiff_t>(offset),
                          x.data().begin() + static_cast<std::ptrdiff_t>(offset + n));
  auto gx = detail::grad_target(x);
  return g.record("row", std::move(shape), std::move(out), {&x}, [gx, offset, n](TensorNode& self) {
    if (!gx) return;
    gx->ensure_grad();
    for (std::size_t i = 0; i < n; ++i) gx->grad[offset + i] += self.grad[i];
  });
}

inline Tensor reshape(Graph& g, const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    throw DimensionError("reshape " + shape_str(x.shape()) + " -> " + shape_str(shape));
  }
  auto gx = detail::grad_target(x);
  return g.record("reshape", std::move(shape), x.values(), {&x}, [gx](TensorNode& self) {
    if (!gx) return;
    gx->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) gx->grad[i] += self.grad[i];
  });
}

// Concatenates rank-1 tensors end to end.
inline Tensor concat(Graph& g, std::span<const Tensor> parts) {
  std::vector<double> out;
  std::vector<std::shared_ptr<TensorNode>> targets;
  std::vector<std::size_t> offsets;
  for (const Tensor& p : parts) {
    detail::require_rank(p, 1, "concat");
    offsets.push_back(out.size());
    targets.push_back(detail::grad_target(p));
    out.insert(out.end(), p.data().begin(), p.data().end());
  }
  const std::size_t n = out.size();
  return g.record("concat", {n}, std::move(out), parts,
                  [targets = std::move(targets), offsets = std::move(offsets)](TensorNode& self) {
                    for (std::size_t k = 0; k < targets.size(); ++k) {
                      if (!targets[k]) continue;
                      targets[k]->ensure_grad();
                      for (std::size_t i = 0; i < targets[k]->grad.size(); ++i)
                        targets[k]->grad[i] += self.grad[offsets[k] + i];
                    }
                  });
}

// Stacks equal-length rank-1 tensors into a [n, d] matrix.
inline Tensor stack_rows(Graph& g, std::span<const Tensor> rows) {
  if (rows.empty()) throw DimensionError("stack_rows needs at least one row");
  const std::size_t d = rows.front().numel();
  for (const Tensor& r : rows) {
    if (r.rank() != 1 || r.numel() != d) {
      throw DimensionError("stack_rows: row shape " + shape_str(r.shape()) + " differs from [" +
                           std::to_string(d) + "]");
    }
  }
  Tensor flat = concat(g, rows);
  return reshape(g, flat, {rows.size(), d});
}

// Sliding windows of `width` consecutive rows of x [T, e], flattened into
// [max(T - width + 1, 1), width * e]. When T < width the single window is
// completed with zero rows.
inline Tensor unfold(Graph& g, const Tensor& x, std::size_t width) {
  detail::require_rank(x, 2, "unfold");
  if (width == 0) throw DimensionError("unfold: width must be positive");
  const std::size_t t = x.dim(0), e = x.dim(1);
  const std::size_t windows = t >= width ? t - width + 1 : 1;
  std::vector<double> out(windows * width * e, 0.0);
  const auto in = x.data();
  for (std::size_t p = 0; p < windows; ++p)
    for (std::size_t k = 0; k < width && p + k < t; ++k)
      for (std::size_t j = 0; j < e; ++j) out[(p * width + k) * e + j] = in[(p + k) * e + j];
  auto gx = detail::grad_target(x);
  return g.record("unfold", {windows, width * e}, std::move(out), {&x},
                  [gx, windows, width, t, e](TensorNode& self) {
                    if (!gx) return;
                    gx->ensure_grad();
                    for (std::size_t p = 0; p < windows; ++p)
                      for (std::size_t k = 0; k < width && p + k < t; ++k)
                        for (std::size_t j = 0; j < e; ++j)
                          gx->grad[(p + k) * e + j] += self.grad[(p * width + k) * e + j];
                  });
}

// ---------------------------------------------------------------------------
// Losses

constexpr double kLogClamp = 1e-12;

// -log(dist[target]), the probability clamped at 1e-12 before the log.
inline Tensor cross_entropy(Graph& g, const Tensor& dist, std::size_t target) {
  detail::require_rank(dist, 1, "cross_entropy");
  if (target >= dist.numel()) {
    throw IndexError("cross_entropy: class " + std::to_string(target) + " outside " +
                     std::to_string(dist.numel()) + " classes");
  }
  double total = 0.0;
  for (double v : dist.data()) total += v;
  if (std::abs(total - 1.0) > 1e-6) {
    throw NumericError("cross_entropy: prediction sums to " + std::to_string(total) + ", not 1");
  }
  const double p = dist[target];
  const bool clamped = p < kLogClamp;
  const double loss = -std::log(clamped ? kLogClamp : p);
  auto gd = detail::grad_target(dist);
  return g.record("cross_entropy", {}, {loss}, {&dist}, [gd, target, p, clamped](TensorNode& self) {
    if (!gd || clamped) return;
    gd->ensure_grad();
    gd->grad[target] += -self.grad[0] / p;
  });
}

inline Tensor squared_error(Graph& g, const Tensor& pred, double target) {
  if (pred.numel() != 1) throw DimensionError("squared_error expects a scalar, got " + shape_str(pred.shape()));
  const double diff = pred[0] - target;
  auto gp = detail::grad_target(pred);
  return g.record("squared_error", {}, {diff * diff}, {&pred}, [gp, diff](TensorNode& self) {
    if (!gp) return;
    gp->ensure_grad();
    gp->grad[0] += 2.0 * diff * self.grad[0];
  });
}

}  // namespace saam::ops
