#include "haucl/hypergraph.hpp"

namespace haucl {

Hypergraph build_initial_incidence(std::size_t num_utterances) {
  if (num_utterances == 0) throw ValueError("build_initial_incidence: empty dialogue");
  std::size_t n = num_utterances;
  std::size_t nodes = 3 * n;
  std::size_t edges = n + 3;
  std::vector<double> h(nodes * edges, 0.0);
  for (std::size_t modality = 0; modality < kNumModalities; ++modality) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t row = node_index(modality, i, n);
      h[row * edges + modality] = 1.0;   // modality hyperedge
      h[row * edges + 3 + i] = 1.0;      // utterance hyperedge
    }
  }
  Hypergraph g;
  g.num_utterances = n;
  g.incidence = Tensor::from({nodes, edges}, std::move(h));
  return g;
}

Degrees degrees(const Tensor& incidence) {
  std::size_t rows = incidence.rows();
  std::size_t cols = incidence.cols();
  Degrees d;
  d.node.assign(rows, 0.0);
  d.edge.assign(cols, 0.0);
  const double* h = incidence.values().data();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      double v = h[i * cols + j];
      d.node[i] += v;
      d.edge[j] += v;
    }
  }
  return d;
}

}  // namespace haucl
