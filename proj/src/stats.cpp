#include "ladderkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ladderkit/types.hpp"

namespace ladder {

double mean(std::span<const double> v) {
  if (v.empty()) throw LadderError("mean of empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

Moments moments(std::span<const double> v) {
  Moments out;
  out.mean = mean(v);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d = x - out.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const double n = static_cast<double>(v.size());
  m2 /= n;
  m3 /= n;
  m4 /= n;
  out.std = std::sqrt(m2);
  // relative guard so rounding noise on a flat sample stays degenerate
  if (m2 <= 1e-24 * std::max(1.0, out.mean * out.mean)) {
    out.std = 0.0;
    return out;
  }
  out.skewness = m3 / std::pow(m2, 1.5);
  out.kurtosis = m4 / (m2 * m2);
  return out;
}

double histogram_entropy(std::span<const double> v, int bins, double lo, double hi) {
  if (v.empty()) return 0.0;
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (double x : v) {
    int b = static_cast<int>(std::floor((x - lo) / (hi - lo) * bins));
    b = std::clamp(b, 0, bins - 1);
    counts[static_cast<std::size_t>(b)] += 1.0;
  }
  double h = 0.0;
  const double n = static_cast<double>(v.size());
  for (double c : counts)
    if (c > 0.0) h -= (c / n) * std::log2(c / n);
  return h + 0.0;
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw LadderError("pearson: need equal lengths >= 2");
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double spearman(std::span<const double> a, std::span<const double> b) {
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  return pearson(ra, rb);
}

double mean_absolute_deviation(std::span<const double> v) {
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += std::abs(x - m);
  return acc / static_cast<double>(v.size());
}

MetricReport regression_metrics(std::span<const double> yTrue, std::span<const double> yPred) {
  if (yTrue.size() != yPred.size() || yTrue.size() < 2) throw LadderError("metrics: need equal lengths >= 2");
  MetricReport r;
  const double n = static_cast<double>(yTrue.size());
  double sse = 0.0, sae = 0.0;
  for (std::size_t i = 0; i < yTrue.size(); ++i) {
    const double e = yPred[i] - yTrue[i];
    sse += e * e;
    sae += std::abs(e);
  }
  r.mae = sae / n;
  r.rmse = std::sqrt(sse / n);
  const double m = mean(yTrue);
  double sst = 0.0;
  for (double y : yTrue) sst += (y - m) * (y - m);
  r.r2 = sst > 0.0 ? 1.0 - sse / sst : (sse == 0.0 ? 1.0 : std::numeric_limits<double>::quiet_NaN());
  r.lcc = pearson(yTrue, yPred);
  r.srocc = spearman(yTrue, yPred);
  if (std::isnan(r.lcc)) r.undefinedReason = "zero variance in ground truth or prediction";
  return r;
}

}  // namespace ladder
