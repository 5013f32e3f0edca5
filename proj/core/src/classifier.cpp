#include "haucl/classifier.hpp"

namespace haucl {

namespace {
constexpr double kLogClamp = 1e-12;
}

HeadParams make_head_params(ParamRegistry& reg, std::size_t d, std::size_t d_h,
                            std::size_t num_classes, RngStream& rng) {
  HeadParams p;
  p.W2 = reg.add("head.W2", {3 * d, d_h}, 3 * d, rng);
  p.b2 = reg.add("head.b2", {1, d_h}, 3 * d, rng);
  p.W3 = reg.add("head.W3", {d_h, num_classes}, d_h, rng);
  p.b3 = reg.add("head.b3", {1, num_classes}, d_h, rng);
  return p;
}

Tensor fuse_views(const Tensor& view1, const Tensor& view2) {
  if (view1.shape() != view2.shape()) {
    throw ShapeError("fuse_views: shapes " + shape_str(view1.shape()) + " vs " +
                     shape_str(view2.shape()));
  }
  return scale(add(view1, view2), 0.5);
}

ClassifyResult classify(const Tensor& fused_nodes, const HeadParams& p) {
  std::size_t rows = fused_nodes.rows();
  if (rows == 0 || rows % 3 != 0) {
    throw ValueError("classify: node count " + std::to_string(rows) +
                     " is not 3x a positive utterance count");
  }
  std::size_t n = rows / 3;
  Tensor per_utt = concat({slice_rows(fused_nodes, 0, n), slice_rows(fused_nodes, n, n),
                           slice_rows(fused_nodes, 2 * n, n)},
                          1);  // [N x 3d]
  Tensor hidden = relu(add(matmul(per_utt, p.W2), p.b2));
  Tensor probs = softmax(add(matmul(hidden, p.W3), p.b3), 1);

  std::size_t c = probs.cols();
  std::vector<int> preds(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < c; ++j) {
      if (probs.at(i, j) > probs.at(i, best)) best = j;
    }
    preds[i] = static_cast<int>(best);
  }
  return {probs, std::move(preds)};
}

Tensor negative_log_likelihood_sum(const Tensor& probs, const std::vector<int>& labels) {
  std::size_t n = probs.rows(), c = probs.cols();
  if (labels.size() != n) {
    throw ShapeError("negative_log_likelihood_sum: " + std::to_string(labels.size()) +
                     " labels for " + std::to_string(n) + " rows");
  }
  std::vector<double> onehot(n * c, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    int y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= c) {
      throw ValueError("label " + std::to_string(y) + " out of range [0, " + std::to_string(c) +
                       ") at row " + std::to_string(i));
    }
    onehot[i * c + static_cast<std::size_t>(y)] = 1.0;
  }
  Tensor picked = sum(mul(probs, Tensor::from({n, c}, std::move(onehot))), 1);  // [N x 1]
  // upper bound chosen above 1 so exact probabilities keep their gradient
  return neg(sum(log_op(clamp(picked, kLogClamp, 2.0))));
}

Tensor cross_entropy_l2(const Tensor& probs, const std::vector<int>& labels,
                        const ParamRegistry* params_for_reg, double lambda) {
  Tensor ce = scale(negative_log_likelihood_sum(probs, labels),
                    1.0 / static_cast<double>(probs.rows()));
  if (params_for_reg != nullptr && lambda > 0.0) {
    ce = add(ce, scale(global_l2_norm(*params_for_reg), lambda));
  }
  return ce;
}

Tensor total_loss(const Tensor& l_ce, const Tensor& l_g_view1, const Tensor& l_g_view2,
                  const Tensor& l_cl, const LossWeights& w) {
  Tensor loss = l_ce;
  if (w.lambda_g != 0.0) {
    loss = add(loss, scale(add(l_g_view1, l_g_view2), 0.5 * w.lambda_g));
  }
  if (w.lambda_cl != 0.0) {
    loss = add(loss, scale(l_cl, w.lambda_cl));
  }
  return loss;
}

}  // namespace haucl
