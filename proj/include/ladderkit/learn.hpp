#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ladderkit/features.hpp"
#include "ladderkit/gp.hpp"
#include "ladderkit/stats.hpp"
#include "ladderkit/types.hpp"

namespace ladder {

// ---- cross-validation ------------------------------------------------------

/// Fold index per sample: a seeded shuffle dealt round-robin into `folds`
/// groups, so fold sizes differ by at most one.
std::vector<int> cv_fold_assignment(std::size_t n, int folds, std::uint64_t seed);

/// Out-of-fold GP predictions using only the listed columns. With `hyper`
/// every fold reuses it; otherwise each fold fits its own.
Eigen::VectorXd cv_predict(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::span<const int> columns,
                           std::span<const int> folds, const GpOptions& gp, const GpHyper* hyper = nullptr);

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& x, std::span<const int> columns);

// ---- recursive feature elimination -----------------------------------------

struct RfeOptions {
  int folds = 10;
  std::uint64_t seed = 1;
  GpOptions gp;
};

struct RfeResult {
  std::vector<int> selected;       // column indices, ascending
  double cvMae = 0.0;
  std::vector<double> maeHistory;  // after each accepted step, starting with all columns
};

/// Backward elimination: drop the column whose removal gives the lowest CV
/// MAE, until every removal makes it strictly worse.
RfeResult rfe_select(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const RfeOptions& options);

// ---- chained cross-over QP prediction ----------------------------------------

/// First feature slot used for chained predictions (F24).
inline constexpr int kChainFirstFeature = 24;

struct CrossoverModel {
  std::string name;
  std::vector<int> features;  // 1-based F indices
  GaussianProcess gp;
};

/// Models in chain order. Model k sees F1..F23 and the continuous predictions
/// of models 0..k-1 as F24 onward.
struct CrossoverPredictor {
  std::vector<CrossoverModel> models;
  QpRange qps;

  std::vector<double> predict_raw(const FeatureVector& fv) const;
  /// Rounded to the nearest integer and clipped to the QP range.
  std::vector<int> predict(const FeatureVector& fv) const;
};

struct CrossoverReportRow {
  std::string name;
  std::vector<int> features;
  MetricReport metrics;       // pooled out-of-fold, on rounded predictions
  double r2FoldMean = 0.0;    // R^2 per held-out fold, averaged
};

struct TrainOptions {
  RfeOptions rfe;
  bool selectFeatures = true;
  QpRange qps;
};

struct TrainResult {
  CrossoverPredictor predictor;
  std::vector<CrossoverReportRow> report;
  std::vector<std::vector<double>> outOfFold;  // per model, continuous
};

/// `truths[i]` holds the cross-over QPs of sample i in `names` order.
TrainResult train_crossover_predictor(const std::vector<FeatureVector>& features,
                                      const std::vector<std::vector<double>>& truths,
                                      const std::vector<std::string>& names, const TrainOptions& options);

// ---- QP / log-rate lines ----------------------------------------------------------

/// QP = alpha * log2(R) + beta.
struct QpLogRateLine {
  double alpha = 0.0;
  double beta = 0.0;

  double qp(double logRate) const { return alpha * logRate + beta; }
  double log_rate(double qp) const { return (qp - beta) / alpha; }
};

struct QPLogRateModel {
  ResolutionSet resolutions;
  std::vector<QpLogRateLine> lines;
  bool shared = false;  // last line took its alpha from the one before

  const QpLogRateLine& at(const Resolution& r) const;
};

/// Least-squares line per resolution from (qp, logRate) pairs. With `share`
/// the last resolution reuses the previous alpha and only needs one point.
QPLogRateModel fit_qp_lograte(const ResolutionSet& resolutions,
                              const std::vector<std::vector<std::pair<double, double>>>& points, bool share);

// ---- linear relation between cross-over QPs ------------------------------------

struct CrossQPRelation {
  double slope = 0.0;
  double intercept = 0.0;
  double lcc = 0.0;
};

/// Least-squares y = slope * x + intercept.
CrossQPRelation fit_cross_relation(std::span<const double> x, std::span<const double> y);

}  // namespace ladder
