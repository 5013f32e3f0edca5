#pragma once

#include <cstddef>
#include <vector>

#include "haucl/tensor.hpp"

namespace haucl {

/// Node layout for a conversation of N utterances: rows [0, N) are the
/// textual nodes, [N, 2N) acoustic, [2N, 3N) visual. Hyperedge layout:
/// columns 0..2 are the three modality edges (t, a, v), column 3+i joins the
/// three modality nodes of utterance i. Hence M == N + 3.
struct Hypergraph {
  std::size_t num_utterances = 0;
  Tensor incidence;   // binary [3N x M], constant
  Tensor node_feats;  // [3N x d]
  Tensor edge_feats;  // optional [M x d]

  std::size_t num_nodes() const { return 3 * num_utterances; }
  std::size_t num_edges() const { return num_utterances + 3; }
};

constexpr std::size_t kNumModalities = 3;

inline std::size_t node_index(std::size_t modality, std::size_t utterance, std::size_t n) {
  return modality * n + utterance;
}

/// Builds the initial incidence structure for N utterances: 3 modality
/// hyperedges plus one hyperedge per utterance. Every node ends up with
/// degree exactly 2. Throws ValueError for N == 0.
Hypergraph build_initial_incidence(std::size_t num_utterances);

struct Degrees {
  std::vector<double> node;  // length 3N
  std::vector<double> edge;  // length M
};

/// Row and column sums of an incidence matrix.
Degrees degrees(const Tensor& incidence);

}  // namespace haucl
