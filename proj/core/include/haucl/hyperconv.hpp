#pragma once

#include <string>

#include "haucl/params.hpp"
#include "haucl/tensor.hpp"

namespace haucl {

struct ConvParams {
  Tensor W_edge, b_edge;  // [d x d], [1 x d]
  Tensor W_node, b_node;  // [d x d], [1 x d]
};

ConvParams make_conv_params(ParamRegistry& reg, const std::string& prefix, std::size_t d,
                            RngStream& init_rng);

struct ConvOutput {
  Tensor nodes;  // [3N x d], post-propagation
  Tensor edges;  // [M x d], post-aggregation
};

/// One hypergraph convolution layer: degree-normalized mean aggregation from
/// nodes onto hyperedges, then from hyperedges back onto nodes with a
/// self-connection, each followed by an affine map and ReLU:
///
///   E' = relu((D_e^{-1} H^T X) W_edge + b_edge)
///   X' = relu((D_v^{-1} H  E' + X) W_node + b_node)
///
/// Zero degrees use the 0/0 = 0 convention. H may be binary (possibly with
/// straight-through gradients) or soft probabilities; degrees are the column
/// and row sums of whatever H holds.
ConvOutput hypergraph_conv(const Tensor& node_feats, const Tensor& incidence,
                           const ConvParams& p);

}  // namespace haucl
