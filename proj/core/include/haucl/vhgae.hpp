#pragma once

#include <string>

#include "haucl/hyperconv.hpp"
#include "haucl/hypergraph.hpp"
#include "haucl/params.hpp"
#include "haucl/rng.hpp"
#include "haucl/tensor.hpp"

namespace haucl {

/// Two-layer head: out = relu(x W0 + b0) W1 + b1, with the variance head
/// additionally passing through softplus.
struct LatentHeadParams {
  Tensor W0, b0;  // [d x d_z], [1 x d_z]
  Tensor W1, b1;  // [d_z x d_z], [1 x d_z]
};

struct VhgaeParams {
  ConvParams conv;  // the encoder's internal hypergraph convolution
  LatentHeadParams node_mu, node_sigma;
  LatentHeadParams edge_mu, edge_sigma;
};

VhgaeParams make_vhgae_params(ParamRegistry& reg, std::size_t d, std::size_t d_z,
                              RngStream& init_rng);

struct LatentStats {
  Tensor mu;     // [n x d_z]
  Tensor sigma;  // [n x d_z], strictly positive
};

/// Mean path: W1(relu(W0 x + b0)) + b1. Variance path: softplus of the same
/// two-layer form, clamped away from zero.
LatentStats latent_params(const Tensor& embeddings, const LatentHeadParams& mu_head,
                          const LatentHeadParams& sigma_head);

/// Reparameterized sample mu + sigma (.) delta; gradients flow into mu and
/// sigma, delta is a constant draw.
Tensor sample_latent(const LatentStats& stats, const Tensor& delta);

struct DecodeResult {
  Tensor incidence;      // binary with straight-through gradients, or the soft probs
  Tensor presence_probs; // [3N x M], strictly inside (0, 1)
};

/// Scores s_ij = <m_node[i], m_edge[j]>; each pair's 2-class logits [s, 0]
/// pass through Gumbel-Softmax at temperature tau, whose presence column
/// reduces to sigmoid((s + g1 - g2) / tau). `gumbel_diff` carries g1 - g2
/// (zeros for the deterministic eval path). With `hard`, entries binarize at
/// presence >= 0.5 (straight-through), and all-zero rows are repaired by
/// switching on their highest-probability entry.
DecodeResult decode_incidence(const Tensor& m_nodes, const Tensor& m_edges, double tau,
                              const Tensor& gumbel_diff, bool hard);

/// Per-element mean of the coordinatewise KL(N(mu, sigma^2) || N(0, 1)).
Tensor gaussian_kl(const LatentStats& stats);

/// Mean binary cross-entropy between the original incidence entries and the
/// decoded presence probabilities (clamped to [1e-7, 1 - 1e-7]).
Tensor incidence_bce(const Tensor& original, const Tensor& presence_probs);

struct VhgaeNoise {
  Tensor delta_nodes;  // [3N x d_z]
  Tensor delta_edges;  // [M x d_z]
  Tensor gumbel_diff;  // [3N x M]
};

VhgaeNoise draw_vhgae_noise(std::size_t num_nodes, std::size_t num_edges, std::size_t d_z,
                            RngStream& delta_rng, RngStream& gumbel_rng);
VhgaeNoise zero_vhgae_noise(std::size_t num_nodes, std::size_t num_edges, std::size_t d_z);

struct VhgaeOutput {
  Tensor incidence;       // reconstructed H for downstream convolution
  Tensor presence_probs;
  LatentStats nodes, edges;
  Tensor loss;            // L_g = KL_nodes + KL_edges + BCE
};

/// Full encoder -> sampler -> decoder -> loss pass over one hypergraph view.
VhgaeOutput run_vhgae(const Tensor& node_feats, const Tensor& original_incidence,
                      const VhgaeParams& params, double tau, const VhgaeNoise& noise, bool hard);

}  // namespace haucl
