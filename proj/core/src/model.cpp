#include "haucl/model.hpp"

namespace haucl {

ModelDims dims_from(const RunConfig& cfg, const Dataset& dataset) {
  ModelDims dims;
  dims.d = cfg.d;
  dims.d_z = cfg.d_z;
  dims.d_h = cfg.d_h;
  dims.conv_layers = cfg.conv_layers;
  dims.dim_t = dataset.dim_t;
  dims.dim_a = dataset.dim_a;
  dims.dim_v = dataset.dim_v;
  dims.num_classes = static_cast<std::size_t>(dataset.num_classes);
  dims.num_speakers = static_cast<std::size_t>(dataset.num_speakers);
  return dims;
}

HauclModel::HauclModel(const ModelDims& dims, RngStream& init_rng) : dims_(dims) {
  encoder_ = make_encoder_params(params_, dims.dim_t, dims.dim_a, dims.dim_v, dims.d,
                                 dims.num_speakers, init_rng);
  vhgae_ = make_vhgae_params(params_, dims.d, dims.d_z, init_rng);
  conv_.reserve(dims.conv_layers);
  for (std::size_t l = 0; l < dims.conv_layers; ++l) {
    conv_.push_back(make_conv_params(params_, "conv" + std::to_string(l), dims.d, init_rng));
  }
  head_ = make_head_params(params_, dims.d, dims.d_h, dims.num_classes, init_rng);
}

HauclModel::Noise HauclModel::draw_noise(std::size_t num_utterances, const ForwardOptions& opts,
                                         RngStream& dropout_rng, RngStream& delta_rng,
                                         RngStream& gumbel_rng) const {
  Noise noise;
  std::size_t nodes = 3 * num_utterances;
  std::size_t edges = num_utterances + 3;
  if (opts.train && opts.dropout_p > 0.0) {
    noise.dropout_mask = make_dropout_mask({nodes, dims_.d}, opts.dropout_p, dropout_rng);
  }
  if (opts.use_vhgae) {
    noise.view1 = draw_vhgae_noise(nodes, edges, dims_.d_z, delta_rng, gumbel_rng);
    noise.view2 = draw_vhgae_noise(nodes, edges, dims_.d_z, delta_rng, gumbel_rng);
    noise.has_vhgae = true;
  }
  return noise;
}

HauclModel::Noise HauclModel::zero_noise(std::size_t num_utterances,
                                         const ForwardOptions& opts) const {
  Noise noise;
  std::size_t nodes = 3 * num_utterances;
  std::size_t edges = num_utterances + 3;
  if (opts.use_vhgae) {
    noise.view1 = zero_vhgae_noise(nodes, edges, dims_.d_z);
    noise.view2 = zero_vhgae_noise(nodes, edges, dims_.d_z);
    noise.has_vhgae = true;
  }
  return noise;
}

Tensor HauclModel::conv_stack(const Tensor& node_feats, const Tensor& incidence) const {
  Tensor x = node_feats;
  for (const ConvParams& layer : conv_) {
    x = hypergraph_conv(x, incidence, layer).nodes;
  }
  return x;
}

HauclModel::Output HauclModel::forward(const DialogueFeatures& dlg, const ForwardOptions& opts,
                                       const Noise& noise) const {
  if (dlg.dim_t != dims_.dim_t || dlg.dim_a != dims_.dim_a || dlg.dim_v != dims_.dim_v) {
    throw DataError("dialogue feature dims (" + std::to_string(dlg.dim_t) + ", " +
                    std::to_string(dlg.dim_a) + ", " + std::to_string(dlg.dim_v) +
                    ") do not match the model");
  }

  Tensor encoded = encode_modalities(dlg, encoder_);
  if (noise.dropout_mask.defined()) {
    encoded = dropout_with_mask(encoded, noise.dropout_mask);
  }
  Tensor fused_nodes =
      embed_and_fuse_speakers(encoded, dlg.speakers, encoder_, opts.use_speaker_embedding);

  Hypergraph graph = build_initial_incidence(dlg.num_utterances);

  Output out;
  out.num_utterances = dlg.num_utterances;

  Tensor view1, view2;
  if (opts.use_vhgae) {
    if (!noise.has_vhgae) throw ValueError("forward: VHGAE path enabled but no noise provided");
    VhgaeOutput v1 = run_vhgae(fused_nodes, graph.incidence, vhgae_, opts.tau_gumbel,
                               noise.view1, opts.hard_incidence);
    VhgaeOutput v2 = run_vhgae(fused_nodes, graph.incidence, vhgae_, opts.tau_gumbel,
                               noise.view2, opts.hard_incidence);
    out.loss_g_view1 = v1.loss;
    out.loss_g_view2 = v2.loss;
    view1 = conv_stack(fused_nodes, v1.incidence);
    view2 = conv_stack(fused_nodes, v2.incidence);
  } else {
    out.loss_g_view1 = Tensor::scalar(0.0);
    out.loss_g_view2 = Tensor::scalar(0.0);
    view1 = conv_stack(fused_nodes, graph.incidence);
    view2 = view1;
  }

  out.loss_cl = opts.use_contrastive ? contrastive_loss(view1, view2, opts.tau_cl)
                                     : Tensor::scalar(0.0);

  ClassifyResult cls = classify(fuse_views(view1, view2), head_);
  out.probs = cls.probs;
  out.preds = std::move(cls.preds);
  out.nll_sum = negative_log_likelihood_sum(out.probs, dlg.labels);
  return out;
}

}  // namespace haucl
