#include "ladderkit/eval.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>

#include "ladderkit/pchip.hpp"
#include "ladderkit/rq.hpp"
#include "ladderkit/stats.hpp"

namespace ladder {

namespace {

/// Least-squares cubic with an analytic integral.
struct Cubic {
  Eigen::Vector4d c;

  static Cubic fit(const std::vector<double>& x, const std::vector<double>& y) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(x.size()), 4);
    Eigen::VectorXd b(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      a(r, 0) = 1.0;
      a(r, 1) = x[i];
      a(r, 2) = x[i] * x[i];
      a(r, 3) = x[i] * x[i] * x[i];
      b[r] = y[i];
    }
    return {a.colPivHouseholderQr().solve(b)};
  }
  double primitive(double x) const {
    return x * (c[0] + x * (c[1] / 2.0 + x * (c[2] / 3.0 + x * c[3] / 4.0)));
  }
  double integrate(double lo, double hi) const { return primitive(hi) - primitive(lo); }
};

double integral(const std::vector<double>& x, const std::vector<double>& y, double lo, double hi,
                BdInterpolation method) {
  if (method == BdInterpolation::Polynomial) return Cubic::fit(x, y).integrate(lo, hi);
  return Pchip<double>::from(x, y).integrate(lo, hi);
}

}  // namespace

BDReport bd_metrics(const BitrateLadder& reference, const BitrateLadder& test, BdInterpolation method) {
  BDReport out;
  const auto ref = enforce_monotone(reference).rungs;
  const auto tst = enforce_monotone(test).rungs;
  if (static_cast<int>(ref.size()) < kBdMinPoints || static_cast<int>(tst.size()) < kBdMinPoints) {
    out.reason = "each ladder needs at least " + std::to_string(kBdMinPoints) + " monotone rungs (reference " +
                 std::to_string(ref.size()) + ", test " + std::to_string(tst.size()) + ")";
    return out;
  }
  std::vector<double> rx, ry, tx, ty;
  for (const auto& r : ref) {
    rx.push_back(r.logRate);
    ry.push_back(r.quality);
  }
  for (const auto& r : tst) {
    tx.push_back(r.logRate);
    ty.push_back(r.quality);
  }
  out.logRateLo = std::max(rx.front(), tx.front());
  out.logRateHi = std::min(rx.back(), tx.back());
  out.qualityLo = std::max(ry.front(), ty.front());
  out.qualityHi = std::min(ry.back(), ty.back());
  if (!(out.logRateHi > out.logRateLo) || !(out.qualityHi > out.qualityLo)) {
    out.reason = "rate or quality ranges do not overlap";
    return out;
  }

  const double dRate = (integral(ty, tx, out.qualityLo, out.qualityHi, method) -
                        integral(ry, rx, out.qualityLo, out.qualityHi, method)) /
                       (out.qualityHi - out.qualityLo);
  const double dPsnr = (integral(tx, ty, out.logRateLo, out.logRateHi, method) -
                        integral(rx, ry, out.logRateLo, out.logRateHi, method)) /
                       (out.logRateHi - out.logRateLo);
  out.bdRatePercent = (std::exp2(dRate) - 1.0) * 100.0;
  out.bdPsnrDb = dPsnr;
  out.comparable = std::isfinite(out.bdRatePercent) && std::isfinite(out.bdPsnrDb);
  if (!out.comparable) out.reason = "non-finite integral";
  return out;
}

double pf_hits(const BitrateLadder& test, const ParetoFront& front) {
  if (test.rungs.empty()) return 0.0;
  int hits = 0;
  for (const auto& r : test.rungs)
    if (front.contains(r.resolution, r.qp)) ++hits;
  return 100.0 * hits / static_cast<double>(test.rungs.size());
}

Histogram histogram(std::span<const double> values, int bins) {
  if (bins < 1) throw LadderError("histogram needs at least one bin");
  Histogram h;
  if (values.empty()) return h;
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / bins;
  for (int i = 0; i <= bins; ++i) h.edges.push_back(lo + i * width);
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    int b = static_cast<int>(std::floor((v - lo) / width));
    b = std::clamp(b, 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

Summary summarize(std::span<const double> values, int bins) {
  if (values.empty()) throw LadderError("summarize: empty set");
  Summary s;
  s.count = values.size();
  s.mean = mean(values);
  s.mad = mean_absolute_deviation(values);
  s.hist = histogram(values, bins);
  return s;
}

}  // namespace ladder
