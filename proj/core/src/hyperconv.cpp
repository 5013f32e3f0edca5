#include "haucl/hyperconv.hpp"

namespace haucl {

namespace {

// 1/x elementwise with 0 -> 0. The zero/nonzero pattern is fixed from the
// forward values; gradients flow through the nonzero entries only.
Tensor safe_reciprocal(const Tensor& t) {
  std::vector<double> mask_vals(t.numel());
  std::vector<double> pad_vals(t.numel());
  for (std::size_t i = 0; i < t.numel(); ++i) {
    bool nz = t.values()[i] != 0.0;
    mask_vals[i] = nz ? 1.0 : 0.0;
    pad_vals[i] = nz ? 0.0 : 1.0;
  }
  Tensor mask = Tensor::from(t.shape(), std::move(mask_vals));
  Tensor pad = Tensor::from(t.shape(), std::move(pad_vals));
  return div(mask, add(t, pad));
}

}  // namespace

ConvParams make_conv_params(ParamRegistry& reg, const std::string& prefix, std::size_t d,
                            RngStream& rng) {
  ConvParams p;
  p.W_edge = reg.add(prefix + ".W_edge", {d, d}, d, rng);
  p.b_edge = reg.add(prefix + ".b_edge", {1, d}, d, rng);
  p.W_node = reg.add(prefix + ".W_node", {d, d}, d, rng);
  p.b_node = reg.add(prefix + ".b_node", {1, d}, d, rng);
  return p;
}

ConvOutput hypergraph_conv(const Tensor& node_feats, const Tensor& incidence,
                           const ConvParams& p) {
  if (incidence.rows() != node_feats.rows()) {
    throw ShapeError("hypergraph_conv: incidence " + shape_str(incidence.shape()) +
                     " does not match node features " + shape_str(node_feats.shape()));
  }
  Tensor h_t = transpose(incidence);

  Tensor edge_deg = sum(incidence, 0);              // [1 x M]
  Tensor edge_scale = transpose(safe_reciprocal(edge_deg));  // [M x 1]
  Tensor edge_mean = mul(matmul(h_t, node_feats), edge_scale);
  Tensor edges = relu(add(matmul(edge_mean, p.W_edge), p.b_edge));

  Tensor node_deg = sum(incidence, 1);              // [3N x 1]
  Tensor node_scale = safe_reciprocal(node_deg);
  Tensor node_mean = mul(matmul(incidence, edges), node_scale);
  // self-connection: the node keeps its own state next to the propagated
  // mean, so a poorly reconstructed incidence cannot erase node identity
  Tensor nodes = relu(add(matmul(add(node_mean, node_feats), p.W_node), p.b_node));

  return {nodes, edges};
}

}  // namespace haucl
