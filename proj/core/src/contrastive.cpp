#include "haucl/contrastive.hpp"

#include <cmath>

namespace haucl {

namespace {

constexpr double kNormEps = 1e-24;  // inside the sqrt; maps zero rows to zero

Tensor row_normalize(const Tensor& x) {
  Tensor norms = sqrt_op(add_scalar(sum(mul(x, x), 1), kNormEps));  // [n x 1]
  return div(x, norms);
}

}  // namespace

double cosine_similarity(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ShapeError("cosine_similarity: length mismatch");
  double dot = 0.0, nx = 0.0, ny = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    nx += x[i] * x[i];
    ny += y[i] * y[i];
  }
  if (nx == 0.0 || ny == 0.0) return 0.0;
  return dot / (std::sqrt(nx) * std::sqrt(ny));
}

Tensor cosine_similarity(const Tensor& x, const Tensor& y) {
  if (x.shape() != y.shape() || x.rank() != 1) {
    throw ShapeError("cosine_similarity: expected equal-length vectors, got " +
                     shape_str(x.shape()) + " and " + shape_str(y.shape()));
  }
  Tensor nx = sqrt_op(add_scalar(sum(mul(x, x)), kNormEps));
  Tensor ny = sqrt_op(add_scalar(sum(mul(y, y)), kNormEps));
  return div(sum(mul(x, y)), mul(nx, ny));
}

Tensor contrastive_loss(const Tensor& view1, const Tensor& view2, double tau) {
  if (!(tau > 0.0)) throw ValueError("contrastive_loss: temperature must be positive");
  if (view1.shape() != view2.shape() || view1.rank() != 2) {
    throw ShapeError("contrastive_loss: views must be equal-shape matrices, got " +
                     shape_str(view1.shape()) + " and " + shape_str(view2.shape()));
  }
  std::size_t n = view1.rows();
  double inv_tau = 1.0 / tau;

  Tensor x1 = row_normalize(view1);
  Tensor x2 = row_normalize(view2);
  Tensor sim12 = matmul(x1, transpose(x2));
  Tensor sim11 = matmul(x1, transpose(x1));
  Tensor sim22 = matmul(x2, transpose(x2));

  // same-view self-pairs are excluded from the denominators
  std::vector<double> mask_vals(n * 2 * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) mask_vals[i * 2 * n + n + i] = 0.0;
  Tensor mask = Tensor::from({n, 2 * n}, std::move(mask_vals));

  Tensor diag_mask = Tensor::zeros({n, n});
  for (std::size_t i = 0; i < n; ++i) diag_mask.mutable_values()[i * n + i] = 1.0;
  Tensor positives = scale(sum(mul(sim12, diag_mask), 1), inv_tau);  // [n x 1]

  auto view_term = [&](const Tensor& cross, const Tensor& same) {
    Tensor terms = scale(concat({cross, same}, 1), inv_tau);  // [n x 2n]
    // detached per-row max over the masked-in entries
    std::vector<double> maxes(n);
    const std::vector<double>& tv = terms.values();
    for (std::size_t i = 0; i < n; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < 2 * n; ++j) {
        if (mask.values()[i * 2 * n + j] > 0.0) mx = std::max(mx, tv[i * 2 * n + j]);
      }
      maxes[i] = mx;
    }
    Tensor row_max = Tensor::from({n, 1}, std::move(maxes));
    Tensor expd = mul(exp_op(sub(terms, row_max)), mask);
    Tensor lse = add(log_op(sum(expd, 1)), row_max);  // [n x 1]
    return sub(lse, positives);
  };

  Tensor f1 = view_term(sim12, sim11);
  Tensor f2 = view_term(transpose(sim12), sim22);
  return scale(add(sum(f1), sum(f2)), 1.0 / (2.0 * static_cast<double>(n)));
}

}  // namespace haucl
