#include "haucl/metrics.hpp"

#include <gtest/gtest.h>

using namespace haucl;

TEST(Accuracy, Basics) {
  EXPECT_DOUBLE_EQ(accuracy({1, 2, 3}, {1, 2, 3}), 1.0);
  EXPECT_DOUBLE_EQ(accuracy({1, 2, 3}, {0, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(accuracy({0, 1, 1, 2}, {0, 1, 1, 0}), 0.75);
  EXPECT_THROW(accuracy({}, {}), ValueError);
  EXPECT_THROW(accuracy({1}, {1, 2}), ValueError);
}

TEST(WeightedF1, PerfectPredictions) {
  EXPECT_DOUBLE_EQ(weighted_f1({0, 1, 2, 1}, {0, 1, 2, 1}, 3), 1.0);
}

TEST(WeightedF1, HandComputedFixture) {
  // class 0: P=1, R=0.5, F1=2/3; class 1: P=2/3, R=1, F1=0.8
  // WF1 = (2*(2/3) + 2*0.8) / 4
  double got = weighted_f1({0, 1, 1, 1}, {0, 0, 1, 1}, 2);
  EXPECT_NEAR(got, (2.0 * (2.0 / 3.0) + 2.0 * 0.8) / 4.0, 1e-12);
  EXPECT_NEAR(got, 0.7333, 5e-5);
}

TEST(WeightedF1, AbsentClassHasZeroWeight) {
  // class 2 never appears in labels; predictions hitting it only cost precision
  double got = weighted_f1({0, 2, 1}, {0, 0, 1}, 3);
  // class 0: P=1, R=0.5, F1=2/3, support 2; class 1: P=1, R=1, F1=1, support 1
  EXPECT_NEAR(got, (2.0 * (2.0 / 3.0) + 1.0 * 1.0) / 3.0, 1e-12);
}

TEST(WeightedF1, ZeroOverZeroConvention) {
  // nothing predicted as class 1 and nothing labeled class 1 -> F1 term 0
  EXPECT_DOUBLE_EQ(weighted_f1({0, 0}, {0, 0}, 2), 1.0);
  // all wrong: every per-class F1 is 0
  EXPECT_DOUBLE_EQ(weighted_f1({1, 0}, {0, 1}, 2), 0.0);
}

TEST(WeightedF1, InRangeAndPermutationInvariant) {
  std::vector<int> preds = {0, 1, 2, 2, 1, 0, 1};
  std::vector<int> labels = {0, 2, 2, 1, 1, 0, 0};
  double base = weighted_f1(preds, labels, 3);
  EXPECT_GE(base, 0.0);
  EXPECT_LE(base, 1.0);

  std::vector<std::size_t> perm = {3, 0, 6, 2, 5, 1, 4};
  std::vector<int> p2(7), l2(7);
  for (std::size_t i = 0; i < 7; ++i) {
    p2[i] = preds[perm[i]];
    l2[i] = labels[perm[i]];
  }
  EXPECT_DOUBLE_EQ(weighted_f1(p2, l2, 3), base);
  EXPECT_DOUBLE_EQ(accuracy(p2, l2), accuracy(preds, labels));
}

TEST(WeightedF1, EqualsAccuracyWhenPrecisionEqualsRecall) {
  // symmetric confusion: each class has P == R
  std::vector<int> labels = {0, 0, 0, 1, 1, 1};
  std::vector<int> preds = {0, 0, 1, 1, 1, 0};
  EXPECT_NEAR(weighted_f1(preds, labels, 2), accuracy(preds, labels), 1e-12);
}

TEST(ConfusionMatrix, CountsAndTotal) {
  ConfusionMatrix cm = ConfusionMatrix::from({0, 1, 1, 0}, {0, 1, 0, 0}, 2);
  EXPECT_EQ(cm.at(0, 0), 2u);
  EXPECT_EQ(cm.at(0, 1), 1u);
  EXPECT_EQ(cm.at(1, 1), 1u);
  EXPECT_EQ(cm.total(), 4u);
  EXPECT_THROW(ConfusionMatrix::from({0, 5}, {0, 0}, 2), ValueError);
}
