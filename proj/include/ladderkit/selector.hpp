#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ladderkit/features.hpp"
#include "ladderkit/types.hpp"

namespace ladder {

/// Binary CART tree (Gini impurity). Labels are 0 or 1.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 for a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;
  };

  void fit(const Eigen::MatrixXd& x, const std::vector<int>& y, const std::vector<std::size_t>& rows, int maxDepth,
           int minSplit = 2);
  int predict(const Eigen::RowVectorXd& x) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  static DecisionTree from_nodes(std::vector<Node> nodes);

 private:
  int grow(const Eigen::MatrixXd& x, const std::vector<int>& y, std::vector<std::size_t> rows, int depth, int maxDepth,
           int minSplit);
  std::vector<Node> nodes_;
};

/// Bootstrap-aggregated trees with a majority vote.
class BaggedTrees {
 public:
  void fit(const Eigen::MatrixXd& x, const std::vector<int>& y, int trees, int maxDepth, std::uint64_t seed);
  int predict(const Eigen::RowVectorXd& x) const;

  const std::vector<DecisionTree>& trees() const { return trees_; }
  static BaggedTrees from_trees(std::vector<DecisionTree> trees);

 private:
  std::vector<DecisionTree> trees_;
};

/// F1..F20.
inline constexpr int kSelectorFeatures = 20;

struct SelectorRun {
  FeatureVector features;
  double bdRateIL = 0.0;  // percent, vs RL
  double bdRateFL = 0.0;
};

struct SelectorOptions {
  double threshold = 0.5;  // BD-Rate percentage points
  int trees = 100;
  int maxDepth = 8;
  int folds = 10;
  std::uint64_t seed = 1;
};

/// Chooses IL or FL per sequence from F1..F20.
struct MethodSelector {
  BaggedTrees ensemble;
  std::optional<LadderMethod> constant;  // set when training saw one class
  double threshold = 0.5;

  LadderMethod choose(const FeatureVector& fv) const;
};

struct SelectorFit {
  MethodSelector selector;
  double cvAccuracy = 0.0;  // NaN when the labels are a single class
  int ilCount = 0;
  int flCount = 0;
  std::vector<std::string> warnings;
};

/// Label IL when FL's BD-Rate exceeds IL's by at least the threshold.
inline bool prefers_il(const SelectorRun& run, double threshold) { return run.bdRateFL - run.bdRateIL >= threshold; }

SelectorFit fit_selector(const std::vector<SelectorRun>& runs, const SelectorOptions& options);

}  // namespace ladder
