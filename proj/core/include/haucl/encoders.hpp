#pragma once

#include <vector>

#include "haucl/dataset.hpp"
#include "haucl/params.hpp"
#include "haucl/tensor.hpp"

namespace haucl {

/// One direction of the gated recurrent cell: update gate z, reset gate r,
/// candidate state n. Input size is the raw textual dim, hidden size H.
///
///   z_t = sigmoid(x_t W_z + h_{t-1} U_z + b_z)
///   r_t = sigmoid(x_t W_r + h_{t-1} U_r + b_r)
///   n_t = tanh(x_t W_n + r_t (.) (h_{t-1} U_n) + b_n)
///   h_t = (1 - z_t) (.) n_t + z_t (.) h_{t-1}
struct GruDirectionParams {
  Tensor W_z, U_z, b_z;
  Tensor W_r, U_r, b_r;
  Tensor W_n, U_n, b_n;
};

struct EncoderParams {
  Tensor W_a, b_a;  // [dim_a x d], [1 x d]
  Tensor W_v, b_v;  // [dim_v x d], [1 x d]
  GruDirectionParams gru_fw, gru_bw;
  Tensor W_t, b_t;  // [2H x d], [1 x d]
  Tensor W_s, b_s;  // [num_speakers x d], [1 x d]
  std::size_t gru_hidden = 0;
};

EncoderParams make_encoder_params(ParamRegistry& reg, std::size_t dim_t, std::size_t dim_a,
                                  std::size_t dim_v, std::size_t d, std::size_t num_speakers,
                                  RngStream& init_rng);

/// Full-sequence pass of one GRU direction over [N x dim_t] inputs; set
/// `reverse` for the backward direction. Returns hidden states in original
/// utterance order, [N x H].
Tensor gru_pass(const Tensor& inputs, const GruDirectionParams& p, bool reverse);

/// Unified-dimension unimodal encoding: affine maps for acoustic/visual rows,
/// a bidirectional recurrent pass plus affine map for textual rows. Output is
/// [3N x d] in [textual block; acoustic block; visual block] order.
Tensor encode_modalities(const DialogueFeatures& dlg, const EncoderParams& p);

/// Adds the learned speaker vector S_i to every modality row of utterance i.
/// With `enabled == false` (the speaker-embedding ablation) returns U as is.
Tensor embed_and_fuse_speakers(const Tensor& encoded, const std::vector<int>& speakers,
                               const EncoderParams& p, bool enabled = true);

}  // namespace haucl
