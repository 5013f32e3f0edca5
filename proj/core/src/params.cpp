#include "haucl/params.hpp"

#include <cmath>

namespace haucl {

Tensor ParamRegistry::add(std::string name, Shape shape, std::size_t fan_in, RngStream& init_rng) {
  double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Tensor t = Tensor::uniform(std::move(shape), -bound, bound, init_rng);
  return add_existing(std::move(name), std::move(t));
}

Tensor ParamRegistry::add_existing(std::string name, Tensor t) {
  if (contains(name)) throw ValueError("ParamRegistry: duplicate parameter name " + name);
  t.set_requires_grad(true);
  items_.emplace_back(std::move(name), t);
  return items_.back().second;
}

std::size_t ParamRegistry::total_elements() const {
  std::size_t n = 0;
  for (const auto& [name, t] : items_) n += t.numel();
  return n;
}

const Tensor& ParamRegistry::find(const std::string& name) const {
  for (const auto& item : items_) {
    if (item.first == name) return item.second;
  }
  throw ValueError("ParamRegistry: unknown parameter " + name);
}

bool ParamRegistry::contains(const std::string& name) const {
  for (const auto& item : items_) {
    if (item.first == name) return true;
  }
  return false;
}

void ParamRegistry::zero_grads() {
  for (auto& [name, t] : items_) t.clear_grad();
}

Tensor global_l2_norm(const ParamRegistry& params) {
  Tensor total = Tensor::scalar(0.0);
  for (const auto& [name, t] : params.items()) {
    total = add(total, sum(mul(t, t)));
  }
  return sqrt_op(total);
}

}  // namespace haucl
