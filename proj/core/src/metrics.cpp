#include "haucl/metrics.hpp"

#include <string>

namespace haucl {

ConfusionMatrix ConfusionMatrix::from(const std::vector<int>& preds,
                                      const std::vector<int>& labels,
                                      std::size_t num_classes) {
  if (preds.size() != labels.size()) {
    throw ValueError("confusion matrix: " + std::to_string(preds.size()) + " predictions vs " +
                     std::to_string(labels.size()) + " labels");
  }
  ConfusionMatrix cm;
  cm.num_classes = num_classes;
  cm.counts.assign(num_classes * num_classes, 0);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    int y = labels[i], p = preds[i];
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes || p < 0 ||
        static_cast<std::size_t>(p) >= num_classes) {
      throw ValueError("confusion matrix: class id out of range at index " + std::to_string(i));
    }
    ++cm.counts[static_cast<std::size_t>(y) * num_classes + static_cast<std::size_t>(p)];
  }
  return cm;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t t = 0;
  for (std::size_t c : counts) t += c;
  return t;
}

double accuracy(const std::vector<int>& preds, const std::vector<int>& labels) {
  if (preds.empty() || preds.size() != labels.size()) {
    throw ValueError("accuracy: inputs must be non-empty and equal length");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) hits += preds[i] == labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

double weighted_f1(const std::vector<int>& preds, const std::vector<int>& labels,
                   std::size_t num_classes) {
  ConfusionMatrix cm = ConfusionMatrix::from(preds, labels, num_classes);
  double total = static_cast<double>(cm.total());
  if (total == 0.0) throw ValueError("weighted_f1: no samples");

  double wf1 = 0.0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    double tp = static_cast<double>(cm.at(c, c));
    double support = 0.0, predicted = 0.0;
    for (std::size_t k = 0; k < num_classes; ++k) {
      support += static_cast<double>(cm.at(c, k));
      predicted += static_cast<double>(cm.at(k, c));
    }
    double precision = predicted > 0.0 ? tp / predicted : 0.0;
    double recall = support > 0.0 ? tp / support : 0.0;
    double f1 = (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    wf1 += (support / total) * f1;
  }
  return wf1;
}

}  // namespace haucl
