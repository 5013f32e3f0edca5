#pragma once

#include <vector>

#include "haucl/classifier.hpp"
#include "haucl/config.hpp"
#include "haucl/contrastive.hpp"
#include "haucl/dataset.hpp"
#include "haucl/encoders.hpp"
#include "haucl/hyperconv.hpp"
#include "haucl/hypergraph.hpp"
#include "haucl/vhgae.hpp"

namespace haucl {

struct ModelDims {
  std::size_t d = 96, d_z = 96, d_h = 96;
  std::size_t conv_layers = 1;
  std::size_t dim_t = 0, dim_a = 0, dim_v = 0;
  std::size_t num_classes = 0, num_speakers = 0;
};

ModelDims dims_from(const RunConfig& cfg, const Dataset& dataset);

/// The full two-view pipeline: unimodal encoding with speaker fusion, two
/// parameter-sharing VHGAE reconstructions driven by independent noise,
/// hypergraph convolution over each reconstructed view, contrastive
/// alignment of the views, fusion, and the per-utterance emotion head.
class HauclModel {
 public:
  HauclModel(const ModelDims& dims, RngStream& init_rng);

  ParamRegistry& params() { return params_; }
  const ParamRegistry& params() const { return params_; }
  const ModelDims& dims() const { return dims_; }

  /// Per-dialogue stochastic draws, held explicitly so gradient checks can
  /// freeze them and repeated evaluation stays deterministic.
  struct Noise {
    Tensor dropout_mask;  // undefined when dropout is off
    VhgaeNoise view1, view2;
    bool has_vhgae = false;
  };

  struct ForwardOptions {
    bool train = true;
    bool hard_incidence = true;
    double dropout_p = 0.0;
    double tau_gumbel = 0.1;
    double tau_cl = 0.5;
    bool use_speaker_embedding = true;
    bool use_vhgae = true;       // off: convolve the initial incidence, no L_g
    bool use_contrastive = true; // off: L_cl fixed at 0
  };

  Noise draw_noise(std::size_t num_utterances, const ForwardOptions& opts,
                   RngStream& dropout_rng, RngStream& delta_rng, RngStream& gumbel_rng) const;
  Noise zero_noise(std::size_t num_utterances, const ForwardOptions& opts) const;

  struct Output {
    Tensor nll_sum;           // sum over utterances of -log P[label]
    std::size_t num_utterances = 0;
    Tensor loss_g_view1, loss_g_view2;  // scalar zeros when the VHGAE path is off
    Tensor loss_cl;                     // scalar zero when contrast is off
    Tensor probs;                       // [N x C]
    std::vector<int> preds;
  };

  Output forward(const DialogueFeatures& dlg, const ForwardOptions& opts,
                 const Noise& noise) const;

 private:
  Tensor conv_stack(const Tensor& node_feats, const Tensor& incidence) const;

  ModelDims dims_;
  ParamRegistry params_;
  EncoderParams encoder_;
  VhgaeParams vhgae_;
  std::vector<ConvParams> conv_;
  HeadParams head_;
};

}  // namespace haucl
