#include "haucl/adam.hpp"

#include <cmath>

namespace haucl {

void Adam::step(ParamRegistry& params) {
  if (slots_.empty()) {
    slots_.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      std::size_t n = params.items()[i].second.numel();
      slots_[i].m.assign(n, 0.0);
      slots_[i].v.assign(n, 0.0);
    }
  }
  if (slots_.size() != params.size()) {
    throw ValueError("Adam::step: registry size changed after first step");
  }
  ++t_;
  double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));

  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor t = params.items()[i].second;
    Slot& slot = slots_[i];
    const std::vector<double>& g = t.grad();
    std::vector<double>& val = t.mutable_values();
    for (std::size_t k = 0; k < val.size(); ++k) {
      double gk = g.empty() ? 0.0 : g[k];
      slot.m[k] = beta1_ * slot.m[k] + (1.0 - beta1_) * gk;
      slot.v[k] = beta2_ * slot.v[k] + (1.0 - beta2_) * gk * gk;
      double m_hat = slot.m[k] / bc1;
      double v_hat = slot.v[k] / bc2;
      val[k] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
    }
  }
}

}  // namespace haucl
