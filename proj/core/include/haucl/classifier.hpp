#pragma once

#include <vector>

#include "haucl/params.hpp"
#include "haucl/tensor.hpp"

namespace haucl {

struct HeadParams {
  Tensor W2, b2;  // [3d x d_h], [1 x d_h]
  Tensor W3, b3;  // [d_h x C], [1 x C]
};

HeadParams make_head_params(ParamRegistry& reg, std::size_t d, std::size_t d_h,
                            std::size_t num_classes, RngStream& init_rng);

struct LossWeights {
  double lambda_g = 0.5;
  double lambda_cl = 1.0;
  double l2_lambda = 0.0;
};

/// Elementwise mean of the two view embeddings.
Tensor fuse_views(const Tensor& view1, const Tensor& view2);

struct ClassifyResult {
  Tensor probs;            // [N x C], rows sum to 1
  std::vector<int> preds;  // argmax with lowest-index tie-break
};

/// Concatenates the three modality rows of each utterance, applies the
/// two-layer head, and softmaxes over classes.
ClassifyResult classify(const Tensor& fused_nodes, const HeadParams& p);

/// -sum_i log probs[i, labels[i]], with the picked probabilities clamped at
/// 1e-12. The batch-level mean is taken by the caller over all utterances.
Tensor negative_log_likelihood_sum(const Tensor& probs, const std::vector<int>& labels);

/// Mean categorical cross-entropy over one probability matrix plus
/// lambda * ||theta||_2 (global L2 norm over `params_for_reg`, skipped when
/// null or lambda == 0).
Tensor cross_entropy_l2(const Tensor& probs, const std::vector<int>& labels,
                        const ParamRegistry* params_for_reg, double lambda);

/// L = L_ce + lambda_g * (L_g1 + L_g2) / 2 + lambda_cl * L_cl
Tensor total_loss(const Tensor& l_ce, const Tensor& l_g_view1, const Tensor& l_g_view2,
                  const Tensor& l_cl, const LossWeights& w);

}  // namespace haucl
