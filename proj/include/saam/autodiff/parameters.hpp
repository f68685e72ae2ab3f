#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "saam/autodiff/tensor.hpp"
#include "saam/rng.hpp"

namespace saam {

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

// Ordered, named collection of trainable leaves. Registration order fixes
// the checkpoint layout and the optimizer's iteration order.
class ParameterStore {
 public:
  Tensor& add(const std::string& name, Tensor tensor) {
    if (index_.count(name)) throw ConfigError("duplicate parameter name: " + name);
    tensor.set_requires_grad(true);
    index_[name] = entries_.size();
    entries_.push_back({name, std::move(tensor)});
    return entries_.back().tensor;
  }

  // Glorot-uniform weights: U(-sqrt(6/(fan_in+fan_out)), +sqrt(...)).
  Tensor& add_glorot(const std::string& name, Shape shape, std::size_t fan_in, std::size_t fan_out,
                     Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::vector<double> values(shape_numel(shape));
    for (double& v : values) v = rng.uniform(-limit, limit);
    return add(name, Tensor::from(std::move(shape), std::move(values)));
  }

  Tensor& add_zeros(const std::string& name, Shape shape) { return add(name, Tensor::zeros(std::move(shape))); }

  const Tensor& get(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("unknown parameter: " + name);
    return entries_[it->second].tensor;
  }
  Tensor& get(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("unknown parameter: " + name);
    return entries_[it->second].tensor;
  }
  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  std::vector<NamedTensor>& entries() { return entries_; }
  const std::vector<NamedTensor>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.tensor.numel();
    return n;
  }

  void zero_grad() {
    for (auto& e : entries_) e.tensor.zero_grad();
  }

  // Value snapshot (used for best-epoch restore).
  std::vector<std::vector<double>> snapshot() const {
    std::vector<std::vector<double>> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.tensor.values());
    return out;
  }

  void restore(const std::vector<std::vector<double>>& values) {
    if (values.size() != entries_.size()) throw DimensionError("parameter snapshot size mismatch");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      auto dst = entries_[i].tensor.mutable_data();
      if (values[i].size() != dst.size()) {
        throw DimensionError("parameter snapshot mismatch for " + entries_[i].name);
      }
      std::copy(values[i].begin(), values[i].end(), dst.begin());
    }
  }

 private:
  std::vector<NamedTensor> entries_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace saam
