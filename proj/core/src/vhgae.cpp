#include "haucl/vhgae.hpp"

#include <limits>

namespace haucl {

namespace {

LatentHeadParams make_head(ParamRegistry& reg, const std::string& prefix, std::size_t d,
                           std::size_t d_z, RngStream& rng) {
  LatentHeadParams p;
  p.W0 = reg.add(prefix + ".W0", {d, d_z}, d, rng);
  p.b0 = reg.add(prefix + ".b0", {1, d_z}, d, rng);
  p.W1 = reg.add(prefix + ".W1", {d_z, d_z}, d_z, rng);
  p.b1 = reg.add(prefix + ".b1", {1, d_z}, d_z, rng);
  return p;
}

constexpr double kSigmaFloor = 1e-10;
constexpr double kProbClamp = 1e-7;

}  // namespace

VhgaeParams make_vhgae_params(ParamRegistry& reg, std::size_t d, std::size_t d_z,
                              RngStream& rng) {
  VhgaeParams p;
  p.conv = make_conv_params(reg, "vhgae.conv", d, rng);
  p.node_mu = make_head(reg, "vhgae.node.mu", d, d_z, rng);
  p.node_sigma = make_head(reg, "vhgae.node.sigma", d, d_z, rng);
  p.edge_mu = make_head(reg, "vhgae.edge.mu", d, d_z, rng);
  p.edge_sigma = make_head(reg, "vhgae.edge.sigma", d, d_z, rng);
  return p;
}

LatentStats latent_params(const Tensor& embeddings, const LatentHeadParams& mu_head,
                          const LatentHeadParams& sigma_head) {
  Tensor mu_hidden = relu(add(matmul(embeddings, mu_head.W0), mu_head.b0));
  Tensor mu = add(matmul(mu_hidden, mu_head.W1), mu_head.b1);

  Tensor sg_hidden = relu(add(matmul(embeddings, sigma_head.W0), sigma_head.b0));
  Tensor sigma_raw = softplus(add(matmul(sg_hidden, sigma_head.W1), sigma_head.b1));
  Tensor sigma = clamp(sigma_raw, kSigmaFloor, std::numeric_limits<double>::infinity());
  return {mu, sigma};
}

Tensor sample_latent(const LatentStats& stats, const Tensor& delta) {
  return add(stats.mu, mul(stats.sigma, delta));
}

DecodeResult decode_incidence(const Tensor& m_nodes, const Tensor& m_edges, double tau,
                              const Tensor& gumbel_diff, bool hard) {
  if (!(tau > 0.0)) throw ValueError("decode_incidence: temperature must be positive");
  Tensor scores = matmul(m_nodes, transpose(m_edges));  // [3N x M]
  Tensor probs = sigmoid(scale(add(scores, gumbel_diff), 1.0 / tau));
  if (!hard) return {probs, probs};

  std::size_t rows = probs.rows(), cols = probs.cols();
  const std::vector<double>& pv = probs.values();
  std::vector<double> binary(pv.size());
  for (std::size_t i = 0; i < pv.size(); ++i) binary[i] = pv[i] >= 0.5 ? 1.0 : 0.0;
  // no isolated nodes: an all-zero row turns on its most probable edge
  for (std::size_t i = 0; i < rows; ++i) {
    bool any = false;
    for (std::size_t j = 0; j < cols; ++j) any = any || binary[i * cols + j] == 1.0;
    if (any) continue;
    std::size_t best = 0;
    for (std::size_t j = 1; j < cols; ++j) {
      if (pv[i * cols + j] > pv[i * cols + best]) best = j;
    }
    binary[i * cols + best] = 1.0;
  }
  return {straight_through(probs, binary), probs};
}

Tensor gaussian_kl(const LatentStats& stats) {
  Tensor per_coord = add_scalar(
      sub(add(mul(stats.sigma, stats.sigma), mul(stats.mu, stats.mu)),
          scale(log_op(stats.sigma), 2.0)),
      -1.0);
  return scale(mean(per_coord), 0.5);
}

Tensor incidence_bce(const Tensor& original, const Tensor& presence_probs) {
  if (original.shape() != presence_probs.shape()) {
    throw ShapeError("incidence_bce: shapes " + shape_str(original.shape()) + " vs " +
                     shape_str(presence_probs.shape()));
  }
  Tensor p = clamp(presence_probs, kProbClamp, 1.0 - kProbClamp);
  Tensor ll = add(mul(original, log_op(p)),
                  mul(sub_from_scalar(1.0, original), log_op(sub_from_scalar(1.0, p))));
  return neg(mean(ll));
}

VhgaeNoise draw_vhgae_noise(std::size_t num_nodes, std::size_t num_edges, std::size_t d_z,
                            RngStream& delta_rng, RngStream& gumbel_rng) {
  VhgaeNoise n;
  n.delta_nodes = Tensor::normal({num_nodes, d_z}, delta_rng);
  n.delta_edges = Tensor::normal({num_edges, d_z}, delta_rng);
  std::vector<double> diff(num_nodes * num_edges);
  for (double& v : diff) {
    double g1 = gumbel_rng.gumbel();
    double g2 = gumbel_rng.gumbel();
    v = g1 - g2;
  }
  n.gumbel_diff = Tensor::from({num_nodes, num_edges}, std::move(diff));
  return n;
}

VhgaeNoise zero_vhgae_noise(std::size_t num_nodes, std::size_t num_edges, std::size_t d_z) {
  VhgaeNoise n;
  n.delta_nodes = Tensor::zeros({num_nodes, d_z});
  n.delta_edges = Tensor::zeros({num_edges, d_z});
  n.gumbel_diff = Tensor::zeros({num_nodes, num_edges});
  return n;
}

VhgaeOutput run_vhgae(const Tensor& node_feats, const Tensor& original_incidence,
                      const VhgaeParams& params, double tau, const VhgaeNoise& noise,
                      bool hard) {
  ConvOutput enc = hypergraph_conv(node_feats, original_incidence, params.conv);

  VhgaeOutput out;
  out.nodes = latent_params(enc.nodes, params.node_mu, params.node_sigma);
  out.edges = latent_params(enc.edges, params.edge_mu, params.edge_sigma);

  Tensor m_nodes = sample_latent(out.nodes, noise.delta_nodes);
  Tensor m_edges = sample_latent(out.edges, noise.delta_edges);

  DecodeResult dec = decode_incidence(m_nodes, m_edges, tau, noise.gumbel_diff, hard);
  out.incidence = dec.incidence;
  out.presence_probs = dec.presence_probs;

  out.loss = add(add(gaussian_kl(out.nodes), gaussian_kl(out.edges)),
                 incidence_bce(original_incidence, dec.presence_probs));
  return out;
}

}  // namespace haucl
