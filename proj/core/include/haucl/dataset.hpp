#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace haucl {

/// One conversation: per-utterance raw feature vectors for the three
/// modalities (row-major [N x dim] blocks), speaker ids and emotion labels.
struct DialogueFeatures {
  std::size_t num_utterances = 0;
  std::size_t dim_t = 0, dim_a = 0, dim_v = 0;
  std::vector<double> text;      // [N x dim_t]
  std::vector<double> acoustic;  // [N x dim_a]
  std::vector<double> visual;    // [N x dim_v]
  std::vector<int> speakers;     // [N], dense ids in [0, num_speakers)
  std::vector<int> labels;       // [N], in [0, num_classes)
};

struct Dataset {
  int num_classes = 0;
  int num_speakers = 0;
  std::size_t dim_t = 0, dim_a = 0, dim_v = 0;
  std::vector<DialogueFeatures> dialogues;

  std::size_t total_utterances() const;
};

}  // namespace haucl
