#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "haucl/rng.hpp"
#include "haucl/tensor.hpp"

namespace haucl {

/// Ordered collection of named trainable tensors. Registration order is the
/// canonical order for initialization, checkpoints, and gradient checks.
class ParamRegistry {
 public:
  /// Creates a parameter initialized uniformly in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
  Tensor add(std::string name, Shape shape, std::size_t fan_in, RngStream& init_rng);

  /// Registers an externally created tensor (marks it requires_grad).
  Tensor add_existing(std::string name, Tensor t);

  const std::vector<std::pair<std::string, Tensor>>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  std::size_t total_elements() const;

  /// Throws ValueError if the name is unknown.
  const Tensor& find(const std::string& name) const;
  bool contains(const std::string& name) const;

  void zero_grads();

 private:
  std::vector<std::pair<std::string, Tensor>> items_;
};

/// sqrt of the summed squares of every parameter, on the tape: the global
/// L2 norm used by the regularization term.
Tensor global_l2_norm(const ParamRegistry& params);

}  // namespace haucl
