#pragma once

#include <vector>

#include "haucl/params.hpp"

namespace haucl {

/// Adam with bias correction. State is kept per parameter in registry order.
class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  /// Applies one update from the gradients currently stored on the
  /// parameters; parameters without a gradient are treated as zero-gradient.
  void step(ParamRegistry& params);

  std::size_t steps_taken() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  struct Slot {
    std::vector<double> m, v;
  };
  std::vector<Slot> slots_;
};

}  // namespace haucl
