#include "ladderkit/gp.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include "ladderkit/types.hpp"

namespace ladder {

Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x0, double step,
                            int maxIterations, double tolerance) {
  const Eigen::Index n = x0.size();
  std::vector<Eigen::VectorXd> simplex{x0};
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd x = x0;
    x[i] += step;
    simplex.push_back(x);
  }
  std::vector<double> fv;
  for (const auto& x : simplex) fv.push_back(f(x));
  std::vector<std::size_t> order(simplex.size());

  for (int it = 0; it < maxIterations; ++it) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];
    if (std::isfinite(fv[worst]) && std::abs(fv[worst] - fv[best]) <= tolerance * (1.0 + std::abs(fv[best]))) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k + 1 < order.size(); ++k) centroid += simplex[order[k]];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd xr = centroid + (centroid - simplex[worst]);
    const double fr = f(xr);
    if (fr < fv[best]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = f(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        fv[worst] = fe;
      } else {
        simplex[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      simplex[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                       : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = f(xc);
    if (fc < (outside ? fr : fv[worst])) {
      simplex[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t k = 1; k < order.size(); ++k) {
      auto& x = simplex[order[k]];
      x = simplex[best] + 0.5 * (x - simplex[best]);
      fv[order[k]] = f(x);
    }
  }
  const auto bestIt = std::min_element(fv.begin(), fv.end());
  return simplex[static_cast<std::size_t>(bestIt - fv.begin())];
}

namespace {

constexpr double kLogLengthRange[2] = {-4.0, 5.0};
constexpr double kLogSignalRange[2] = {-4.0, 4.0};
constexpr double kLogNoiseRange[2] = {-9.0, 1.0};

GpHyper clamp_hyper(GpHyper h) {
  h.logLength = std::clamp(h.logLength, kLogLengthRange[0], kLogLengthRange[1]);
  h.logSignal = std::clamp(h.logSignal, kLogSignalRange[0], kLogSignalRange[1]);
  h.logNoise = std::clamp(h.logNoise, kLogNoiseRange[0], kLogNoiseRange[1]);
  return h;
}

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::VectorXd an = a.rowwise().squaredNorm();
  const Eigen::VectorXd bn = b.rowwise().squaredNorm();
  Eigen::MatrixXd d = (-2.0 * a * b.transpose()).colwise() + an;
  d.rowwise() += bn.transpose();
  return d.cwiseMax(0.0);
}

Eigen::MatrixXd rbf(const Eigen::MatrixXd& d2, const GpHyper& h) {
  const double l2 = std::exp(2.0 * h.logLength);
  const double s2 = std::exp(2.0 * h.logSignal);
  return (s2 * (-0.5 / l2 * d2.array()).exp()).matrix();
}

struct Factor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;
  bool ok = false;
};

Factor factorize(const Eigen::MatrixXd& k, double noiseVar, const GpOptions& o) {
  Factor f;
  for (double j = o.jitter; j <= o.maxJitter * (1.0 + 1e-9); j *= 10.0) {
    Eigen::MatrixXd a = k;
    a.diagonal().array() += noiseVar + j;
    f.llt.compute(a);
    if (f.llt.info() == Eigen::Success) {
      f.jitter = j;
      f.ok = true;
      return f;
    }
  }
  return f;
}

double noise_variance(const GpHyper& h, const GpOptions& o) {
  return o.fitNoise ? std::exp(2.0 * h.logNoise) : o.fixedNoiseVariance;
}

double neg_log_marginal(const Eigen::MatrixXd& d2, const Eigen::VectorXd& y, const GpHyper& h, const GpOptions& o) {
  const Factor f = factorize(rbf(d2, h), noise_variance(h, o), o);
  if (!f.ok) return std::numeric_limits<double>::infinity();
  const Eigen::VectorXd w = f.llt.solve(y);
  const double logDet = 2.0 * f.llt.matrixLLT().diagonal().array().log().sum();
  const double v = 0.5 * y.dot(w) + 0.5 * logDet + 0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

Eigen::VectorXd pack(const GpHyper& h, bool withNoise) {
  Eigen::VectorXd v(withNoise ? 3 : 2);
  v[0] = h.logLength;
  v[1] = h.logSignal;
  if (withNoise) v[2] = h.logNoise;
  return v;
}

GpHyper unpack(const Eigen::VectorXd& v, bool withNoise) {
  GpHyper h;
  h.logLength = v[0];
  h.logSignal = v[1];
  if (withNoise) h.logNoise = v[2];
  return clamp_hyper(h);
}

}  // namespace

void GaussianProcess::fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const GpOptions& options,
                          const GpHyper* start, const GpHyper* fixed) {
  const Eigen::Index n = x.rows();
  if (n < 1 || y.size() != n) throw LadderError("gp: need matching non-empty inputs and targets");
  if (x.cols() < 1) throw LadderError("gp: need at least one input column");

  xMean_ = x.colwise().mean();
  xScale_ = ((x.rowwise() - xMean_).array().square().colwise().sum() / static_cast<double>(n)).sqrt().matrix();
  for (Eigen::Index c = 0; c < xScale_.size(); ++c)
    if (!(xScale_[c] > 0.0)) xScale_[c] = 1.0;
  xs_ = (x.rowwise() - xMean_).array().rowwise() / xScale_.array();

  yMean_ = y.mean();
  const double ys = std::sqrt((y.array() - yMean_).square().mean());
  yScale_ = ys > 0.0 ? ys : 1.0;
  const Eigen::VectorXd yn = (y.array() - yMean_) / yScale_;

  const Eigen::MatrixXd d2 = squared_distances(xs_, xs_);
  if (fixed) {
    hyper_ = clamp_hyper(*fixed);
  } else {
    const bool withNoise = options.fitNoise;
    auto objective = [&](const Eigen::VectorXd& v) { return neg_log_marginal(d2, yn, unpack(v, withNoise), options); };
    const double logDim = 0.5 * std::log(static_cast<double>(x.cols()));
    std::vector<GpHyper> starts;
    if (start) {
      starts.push_back(*start);
    } else {
      starts.push_back({logDim, 0.0, std::log(0.1)});
    }
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (static_cast<int>(starts.size()) < std::max(1, options.restarts))
      starts.push_back({logDim - 1.5 + 3.0 * unit(rng), -1.0 + 2.0 * unit(rng), -6.0 + 5.5 * unit(rng)});

    double bestVal = std::numeric_limits<double>::infinity();
    GpHyper best = clamp_hyper(starts.front());
    for (const auto& s : starts) {
      const Eigen::VectorXd v = nelder_mead(objective, pack(clamp_hyper(s), withNoise), 0.5, options.maxIterations);
      const double val = objective(v);
      if (val < bestVal) {
        bestVal = val;
        best = unpack(v, withNoise);
      }
    }
    hyper_ = best;
  }

  noiseVar_ = noise_variance(hyper_, options);
  const Factor f = factorize(rbf(d2, hyper_), noiseVar_, options);
  if (!f.ok) throw LadderError("gp: kernel matrix not positive definite after jitter escalation");
  jitter_ = f.jitter;
  weights_ = f.llt.solve(yn);
  nlml_ = neg_log_marginal(d2, yn, hyper_, options);
}

Eigen::VectorXd GaussianProcess::predict_rows(const Eigen::MatrixXd& x) const {
  if (!fitted()) throw LadderError("gp: model not fitted");
  if (x.cols() != xs_.cols()) throw LadderError("gp: input has the wrong number of columns");
  const Eigen::MatrixXd q = (x.rowwise() - xMean_).array().rowwise() / xScale_.array();
  const Eigen::VectorXd mu = rbf(squared_distances(q, xs_), hyper_) * weights_;
  return (mu.array() * yScale_ + yMean_).matrix();
}

double GaussianProcess::predict(const Eigen::RowVectorXd& x) const { return predict_rows(Eigen::MatrixXd(x))[0]; }

GaussianProcess::State GaussianProcess::state() const {
  return {xMean_, xScale_, yMean_, yScale_, xs_, weights_, hyper_, noiseVar_, jitter_};
}

GaussianProcess GaussianProcess::from_state(const State& s) {
  GaussianProcess gp;
  gp.xMean_ = s.xMean;
  gp.xScale_ = s.xScale;
  gp.yMean_ = s.yMean;
  gp.yScale_ = s.yScale;
  gp.xs_ = s.xs;
  gp.weights_ = s.weights;
  gp.hyper_ = s.hyper;
  gp.noiseVar_ = s.noiseVariance;
  gp.jitter_ = s.jitter;
  return gp;
}

}  // namespace ladder
