#pragma once

#include <span>
#include <string>
#include <vector>

namespace ladder {

double mean(std::span<const double> v);
/// Population standard deviation.
double stddev(std::span<const double> v);

/// Moments of a sample; skewness 0 and kurtosis 3 when the sample is flat.
struct Moments {
  double mean = 0.0;
  double std = 0.0;
  double skewness = 0.0;
  double kurtosis = 3.0;  // Pearson (non-excess)
};
Moments moments(std::span<const double> v);

/// Shannon entropy (bits) of a fixed-bin histogram over [lo, hi].
double histogram_entropy(std::span<const double> v, int bins, double lo, double hi);

/// 1-based ranks, ties get the average rank.
std::vector<double> average_ranks(std::span<const double> v);

double pearson(std::span<const double> a, std::span<const double> b);
double spearman(std::span<const double> a, std::span<const double> b);

/// mean(|x - mean(x)|)
double mean_absolute_deviation(std::span<const double> v);

struct MetricReport {
  double lcc = 0.0;
  double srocc = 0.0;
  double r2 = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  std::string undefinedReason;  // set when lcc/srocc are NaN
};

/// Pearson, Spearman, coefficient of determination, MAE and RMSE. LCC and
/// SROCC are NaN with a reason when either input has zero variance.
MetricReport regression_metrics(std::span<const double> yTrue, std::span<const double> yPred);

}  // namespace ladder
