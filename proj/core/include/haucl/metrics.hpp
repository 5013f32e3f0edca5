#pragma once

#include <cstddef>
#include <vector>

#include "haucl/errors.hpp"

namespace haucl {

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  std::size_t num_classes = 0;
  std::vector<std::size_t> counts;  // [C x C] row-major

  static ConfusionMatrix from(const std::vector<int>& preds, const std::vector<int>& labels,
                              std::size_t num_classes);
  std::size_t at(std::size_t true_class, std::size_t pred_class) const {
    return counts[true_class * num_classes + pred_class];
  }
  std::size_t total() const;
};

/// Fraction of matching entries. Throws ValueError on empty or mismatched input.
double accuracy(const std::vector<int>& preds, const std::vector<int>& labels);

/// Support-weighted mean of per-class F1 = 2PR/(P+R), with the 0/0 -> 0
/// convention for precision, recall and F1.
double weighted_f1(const std::vector<int>& preds, const std::vector<int>& labels,
                   std::size_t num_classes);

}  // namespace haucl
