#pragma once

#include <vector>

#include "haucl/tensor.hpp"

namespace haucl {

/// <x,y> / (|x| |y|); returns 0 if either vector has zero norm.
double cosine_similarity(const std::vector<double>& x, const std::vector<double>& y);

/// Differentiable cosine similarity between two 1-D tensors of equal length.
Tensor cosine_similarity(const Tensor& x, const Tensor& y);

/// Point-to-point contrastive loss between two [3N x d] node-embedding views.
/// Corresponding rows are positives; the denominator of each term holds the
/// positive pair, the cross-view negatives and the same-view negatives, with
/// q(x, y) = exp(cos(x, y) / tau). The two asymmetric terms are averaged:
///
///   L = (1 / 2n) sum_i [ f(v1_i, v2_i) + f(v2_i, v1_i) ]
///
/// Computed in log space with per-row max subtraction.
Tensor contrastive_loss(const Tensor& view1, const Tensor& view2, double tau);

}  // namespace haucl
