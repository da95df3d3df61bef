#pragma once

#include <span>
#include <string>
#include <vector>

#include "ladderkit/types.hpp"

namespace ladder {

enum class BdInterpolation { Pchip, Polynomial };

struct BDReport {
  bool comparable = false;
  std::string reason;  // why not comparable
  double bdRatePercent = 0.0;
  double bdPsnrDb = 0.0;
  double logRateLo = 0.0;  // shared log-rate interval (BD-PSNR)
  double logRateHi = 0.0;
  double qualityLo = 0.0;  // shared quality interval (BD-Rate)
  double qualityHi = 0.0;
};

inline constexpr int kBdMinPoints = 4;

/// Bjontegaard deltas of `test` against `reference`. Positive BD-Rate means
/// the test ladder needs more rate for the same quality.
BDReport bd_metrics(const BitrateLadder& reference, const BitrateLadder& test,
                    BdInterpolation method = BdInterpolation::Pchip);

/// Percentage of rungs whose (resolution, QP) is a front point.
double pf_hits(const BitrateLadder& test, const ParetoFront& front);

struct Histogram {
  std::vector<double> edges;  // bins + 1 edges
  std::vector<int> counts;
};

Histogram histogram(std::span<const double> values, int bins);

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double mad = 0.0;  // mean absolute deviation about the mean
  Histogram hist;
};

Summary summarize(std::span<const double> values, int bins = 10);

}  // namespace ladder
