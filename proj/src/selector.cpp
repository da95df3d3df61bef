#include "ladderkit/selector.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ladderkit/learn.hpp"

namespace ladder {

namespace {

double gini(int ones, int total) {
  if (total == 0) return 0.0;
  const double p = static_cast<double>(ones) / total;
  return 2.0 * p * (1.0 - p);
}

Eigen::RowVectorXd selector_row(const FeatureVector& fv) {
  Eigen::RowVectorXd row(kSelectorFeatures);
  for (int f = 1; f <= kSelectorFeatures; ++f) row[f - 1] = fv.f(f);
  return row;
}

}  // namespace

void DecisionTree::fit(const Eigen::MatrixXd& x, const std::vector<int>& y, const std::vector<std::size_t>& rows,
                       int maxDepth, int minSplit) {
  nodes_.clear();
  if (rows.empty()) throw LadderError("tree: no training rows");
  grow(x, y, rows, 0, maxDepth, minSplit);
}

int DecisionTree::grow(const Eigen::MatrixXd& x, const std::vector<int>& y, std::vector<std::size_t> rows, int depth,
                       int maxDepth, int minSplit) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  int ones = 0;
  for (auto r : rows) ones += y[r];
  const int total = static_cast<int>(rows.size());
  nodes_[static_cast<std::size_t>(index)].label = 2 * ones > total ? 1 : 0;
  if (depth >= maxDepth || total < minSplit || ones == 0 || ones == total) return index;

  double bestImpurity = gini(ones, total);
  int bestFeature = -1;
  double bestThreshold = 0.0;
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
      return x(static_cast<Eigen::Index>(a), f) < x(static_cast<Eigen::Index>(b), f);
    });
    int leftOnes = 0;
    for (int i = 0; i + 1 < total; ++i) {
      leftOnes += y[rows[static_cast<std::size_t>(i)]];
      const double a = x(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]), f);
      const double b = x(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i + 1)]), f);
      if (!(a < b)) continue;
      const int nl = i + 1, nr = total - nl;
      const double imp = (nl * gini(leftOnes, nl) + nr * gini(ones - leftOnes, nr)) / total;
      if (imp < bestImpurity - 1e-12) {
        bestImpurity = imp;
        bestFeature = static_cast<int>(f);
        bestThreshold = 0.5 * (a + b);
      }
    }
  }
  if (bestFeature < 0) return index;

  std::vector<std::size_t> left, right;
  for (auto r : rows) (x(static_cast<Eigen::Index>(r), bestFeature) <= bestThreshold ? left : right).push_back(r);
  const int l = grow(x, y, std::move(left), depth + 1, maxDepth, minSplit);
  const int rr = grow(x, y, std::move(right), depth + 1, maxDepth, minSplit);
  auto& node = nodes_[static_cast<std::size_t>(index)];
  node.feature = bestFeature;
  node.threshold = bestThreshold;
  node.left = l;
  node.right = rr;
  return index;
}

int DecisionTree::predict(const Eigen::RowVectorXd& x) const {
  if (nodes_.empty()) throw LadderError("tree: not fitted");
  int i = 0;
  while (nodes_[static_cast<std::size_t>(i)].feature >= 0) {
    const auto& n = nodes_[static_cast<std::size_t>(i)];
    if (n.feature >= x.size()) throw LadderError("tree: input has too few columns");
    i = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes_[static_cast<std::size_t>(i)].label;
}

DecisionTree DecisionTree::from_nodes(std::vector<Node> nodes) {
  const int n = static_cast<int>(nodes.size());
  if (n == 0) throw LadderError("tree: no nodes");
  for (const auto& node : nodes)
    if (node.feature >= 0 && (node.left <= 0 || node.left >= n || node.right <= 0 || node.right >= n))
      throw LadderError("tree: child index out of range");
  DecisionTree t;
  t.nodes_ = std::move(nodes);
  return t;
}

void BaggedTrees::fit(const Eigen::MatrixXd& x, const std::vector<int>& y, int trees, int maxDepth,
                      std::uint64_t seed) {
  const std::size_t n = static_cast<std::size_t>(x.rows());
  if (n == 0 || y.size() != n) throw LadderError("bagging: bad training data");
  trees_.assign(static_cast<std::size_t>(trees), {});
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (auto& t : trees_) {
    std::vector<std::size_t> rows(n);
    for (auto& r : rows) r = pick(rng);
    t.fit(x, y, rows, maxDepth);
  }
}

int BaggedTrees::predict(const Eigen::RowVectorXd& x) const {
  if (trees_.empty()) throw LadderError("bagging: not fitted");
  int votes = 0;
  for (const auto& t : trees_) votes += t.predict(x);
  return 2 * votes > static_cast<int>(trees_.size()) ? 1 : 0;
}

BaggedTrees BaggedTrees::from_trees(std::vector<DecisionTree> trees) {
  BaggedTrees b;
  b.trees_ = std::move(trees);
  return b;
}

LadderMethod MethodSelector::choose(const FeatureVector& fv) const {
  if (constant) return *constant;
  return ensemble.predict(selector_row(fv)) == 1 ? LadderMethod::IL : LadderMethod::FL;
}

SelectorFit fit_selector(const std::vector<SelectorRun>& runs, const SelectorOptions& options) {
  if (runs.empty()) throw LadderError("selector: no training runs");
  SelectorFit out;
  out.selector.threshold = options.threshold;
  const std::size_t n = runs.size();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), kSelectorFeatures);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x.row(static_cast<Eigen::Index>(i)) = selector_row(runs[i].features);
    y[i] = prefers_il(runs[i], options.threshold) ? 1 : 0;
    (y[i] ? out.ilCount : out.flCount) += 1;
  }
  if (out.ilCount == 0 || out.flCount == 0) {
    out.selector.constant = out.ilCount ? LadderMethod::IL : LadderMethod::FL;
    out.cvAccuracy = std::nan("");
    out.warnings.push_back("selector labels are all " + to_string(*out.selector.constant) +
                           "; using a constant classifier");
    return out;
  }
  out.selector.ensemble.fit(x, y, options.trees, options.maxDepth, options.seed);

  const int folds = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(options.folds), n));
  if (folds >= 2) {
    const auto assign = cv_fold_assignment(n, folds, options.seed);
    int correct = 0;
    for (int f = 0; f < folds; ++f) {
      std::vector<Eigen::Index> train;
      for (std::size_t i = 0; i < n; ++i)
        if (assign[i] != f) train.push_back(static_cast<Eigen::Index>(i));
      Eigen::MatrixXd xt(static_cast<Eigen::Index>(train.size()), kSelectorFeatures);
      std::vector<int> yt;
      for (std::size_t i = 0; i < train.size(); ++i) {
        xt.row(static_cast<Eigen::Index>(i)) = x.row(train[i]);
        yt.push_back(y[static_cast<std::size_t>(train[i])]);
      }
      BaggedTrees model;
      model.fit(xt, yt, options.trees, options.maxDepth, options.seed + static_cast<std::uint64_t>(f) + 1);
      for (std::size_t i = 0; i < n; ++i)
        if (assign[i] == f && model.predict(x.row(static_cast<Eigen::Index>(i))) == y[i]) ++correct;
    }
    out.cvAccuracy = static_cast<double>(correct) / static_cast<double>(n);
  } else {
    out.cvAccuracy = std::nan("");
  }
  return out;
}

}  // namespace ladder
