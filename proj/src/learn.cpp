#include "ladderkit/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace ladder {

std::vector<int> cv_fold_assignment(std::size_t n, int folds, std::uint64_t seed) {
  if (folds < 2) throw LadderError("cross-validation needs at least two folds");
  if (n < static_cast<std::size_t>(folds))
    throw LadderError("cross-validation: " + std::to_string(n) + " samples for " + std::to_string(folds) + " folds");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> fold(n);
  for (std::size_t i = 0; i < n; ++i) fold[perm[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
  return fold;
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& x, std::span<const int> columns) {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = x.col(columns[c]);
  return out;
}

namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  return out;
}

Eigen::VectorXd take_rows(const Eigen::VectorXd& y, const std::vector<Eigen::Index>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Eigen::Index>(i)] = y[rows[i]];
  return out;
}

double mae(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).cwiseAbs().mean(); }

}  // namespace

Eigen::VectorXd cv_predict(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::span<const int> columns,
                           std::span<const int> folds, const GpOptions& gp, const GpHyper* hyper) {
  if (folds.size() != static_cast<std::size_t>(x.rows())) throw LadderError("fold assignment size mismatch");
  const Eigen::MatrixXd xc = select_columns(x, columns);
  const int k = *std::max_element(folds.begin(), folds.end()) + 1;
  Eigen::VectorXd out(x.rows());
  for (int f = 0; f < k; ++f) {
    std::vector<Eigen::Index> train, test;
    for (std::size_t i = 0; i < folds.size(); ++i) (folds[i] == f ? test : train).push_back(static_cast<Eigen::Index>(i));
    if (test.empty()) continue;
    GaussianProcess model;
    model.fit(take_rows(xc, train), take_rows(y, train), gp, nullptr, hyper);
    const Eigen::VectorXd p = model.predict_rows(take_rows(xc, test));
    for (std::size_t i = 0; i < test.size(); ++i) out[test[i]] = p[static_cast<Eigen::Index>(i)];
  }
  return out;
}

RfeResult rfe_select(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const RfeOptions& options) {
  if (x.rows() < 2 * options.folds)
    throw LadderError("feature selection needs at least " + std::to_string(2 * options.folds) + " samples, got " +
                      std::to_string(x.rows()));
  if (x.cols() < 1) throw LadderError("feature selection needs at least one column");
  const std::vector<int> folds = cv_fold_assignment(static_cast<std::size_t>(x.rows()), options.folds, options.seed);

  // Hyperparameters are fitted once per candidate subset on all rows and
  // reused by every fold.
  GpOptions warm = options.gp;
  warm.restarts = 1;
  auto score = [&](const std::vector<int>& cols, const GpHyper* start, GpHyper& fitted) {
    GaussianProcess model;
    model.fit(select_columns(x, cols), y, start ? warm : options.gp, start);
    fitted = model.hyper();
    return mae(cv_predict(x, y, cols, folds, options.gp, &fitted), y);
  };

  RfeResult result;
  result.selected.resize(static_cast<std::size_t>(x.cols()));
  std::iota(result.selected.begin(), result.selected.end(), 0);
  GpHyper current;
  result.cvMae = score(result.selected, nullptr, current);
  result.maeHistory.push_back(result.cvMae);

  while (result.selected.size() > 1) {
    double bestMae = 0.0;
    std::size_t bestDrop = result.selected.size();
    GpHyper bestHyper;
    for (std::size_t d = 0; d < result.selected.size(); ++d) {
      std::vector<int> cols = result.selected;
      cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(d));
      GpHyper h;
      const double m = score(cols, &current, h);
      if (bestDrop == result.selected.size() || m < bestMae) {
        bestMae = m;
        bestDrop = d;
        bestHyper = h;
      }
    }
    if (bestMae > result.cvMae) break;
    result.selected.erase(result.selected.begin() + static_cast<std::ptrdiff_t>(bestDrop));
    result.cvMae = bestMae;
    current = bestHyper;
    result.maeHistory.push_back(bestMae);
  }
  return result;
}

// ---- chained prediction -----------------------------------------------------

std::vector<double> CrossoverPredictor::predict_raw(const FeatureVector& input) const {
  FeatureVector fv = input;
  std::vector<double> out;
  for (std::size_t k = 0; k < models.size(); ++k) {
    const auto& m = models[k];
    Eigen::RowVectorXd row(static_cast<Eigen::Index>(m.features.size()));
    for (std::size_t c = 0; c < m.features.size(); ++c) {
      const int f = m.features[c];
      if (f >= kChainFirstFeature + static_cast<int>(k)) throw LadderError(m.name + " uses a later chained feature");
      if (!fv.has(f)) throw LadderError(m.name + " needs feature " + FeatureVector::name(f));
      row[static_cast<Eigen::Index>(c)] = fv.f(f);
    }
    const double p = m.gp.predict(row);
    out.push_back(p);
    const int slot = kChainFirstFeature + static_cast<int>(k);
    if (slot <= FeatureVector::kCount) fv.set(slot, p);
  }
  return out;
}

std::vector<int> CrossoverPredictor::predict(const FeatureVector& fv) const {
  std::vector<int> out;
  for (double p : predict_raw(fv)) out.push_back(qps.clip(static_cast<int>(std::lround(p))));
  return out;
}

TrainResult train_crossover_predictor(const std::vector<FeatureVector>& features,
                                      const std::vector<std::vector<double>>& truths,
                                      const std::vector<std::string>& names, const TrainOptions& options) {
  const std::size_t n = features.size();
  if (n == 0) throw LadderError("no training samples");
  if (truths.size() != n) throw LadderError("feature and ground-truth row counts differ");
  for (const auto& t : truths)
    if (t.size() != names.size()) throw LadderError("ground-truth row has the wrong number of cross-over QPs");

  const int chainSlots = FeatureVector::kCount - FeatureVector::kContent;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), FeatureVector::kCount);
  x.setZero();
  for (std::size_t i = 0; i < n; ++i)
    for (int f = 1; f <= FeatureVector::kContent; ++f) {
      if (!features[i].has(f)) throw LadderError("training sample " + std::to_string(i) + " lacks " + FeatureVector::name(f));
      x(static_cast<Eigen::Index>(i), f - 1) = features[i].f(f);
    }

  const std::vector<int> folds = cv_fold_assignment(n, options.rfe.folds, options.rfe.seed);
  TrainResult result;
  result.predictor.qps = options.qps;

  for (std::size_t k = 0; k < names.size(); ++k) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) y[static_cast<Eigen::Index>(i)] = truths[i][k];

    std::vector<int> pool(static_cast<std::size_t>(FeatureVector::kContent + std::min<int>(static_cast<int>(k), chainSlots)));
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<int> cols = pool;
    if (options.selectFeatures) {
      const RfeResult rfe = rfe_select(select_columns(x, pool), y, options.rfe);
      cols.clear();
      for (int c : rfe.selected) cols.push_back(pool[static_cast<std::size_t>(c)]);
    }

    CrossoverModel model;
    model.name = names[k];
    for (int c : cols) model.features.push_back(c + 1);
    GpOptions gp = options.rfe.gp;
    gp.seed = options.rfe.gp.seed + k;
    model.gp.fit(select_columns(x, cols), y, gp);

    const Eigen::VectorXd oof = cv_predict(x, y, cols, folds, gp);
    result.outOfFold.emplace_back(oof.data(), oof.data() + oof.size());
    if (static_cast<int>(k) < chainSlots) x.col(FeatureVector::kContent + static_cast<Eigen::Index>(k)) = oof;

    std::vector<double> truth(y.data(), y.data() + y.size()), rounded;
    for (Eigen::Index i = 0; i < oof.size(); ++i) rounded.push_back(options.qps.clip(static_cast<int>(std::lround(oof[i]))));
    CrossoverReportRow row;
    row.name = names[k];
    row.features = model.features;
    row.metrics = regression_metrics(truth, rounded);
    double r2Sum = 0.0;
    int r2Count = 0;
    for (int f = 0; f < options.rfe.folds; ++f) {
      std::vector<double> ft, fp;
      for (std::size_t i = 0; i < n; ++i)
        if (folds[i] == f) {
          ft.push_back(truth[i]);
          fp.push_back(rounded[i]);
        }
      if (ft.size() < 2 || stddev(ft) == 0.0) continue;
      r2Sum += regression_metrics(ft, fp).r2;
      ++r2Count;
    }
    row.r2FoldMean = r2Count ? r2Sum / r2Count : std::nan("");
    result.report.push_back(std::move(row));
    result.predictor.models.push_back(std::move(model));
  }
  return result;
}

// ---- QP / log-rate --------------------------------------------------------------

const QpLogRateLine& QPLogRateModel::at(const Resolution& r) const {
  for (std::size_t i = 0; i < resolutions.size(); ++i)
    if (resolutions[i] == r) return lines[i];
  throw LadderError("no QP/log-rate line for " + r.label);
}

QPLogRateModel fit_qp_lograte(const ResolutionSet& resolutions,
                              const std::vector<std::vector<std::pair<double, double>>>& points, bool share) {
  if (points.size() != resolutions.size()) throw LadderError("one point list per resolution required");
  QPLogRateModel model;
  model.resolutions = resolutions;
  model.shared = share;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& pts = points[k];
    const bool inherit = share && k + 1 == points.size() && k > 0;
    QpLogRateLine line;
    if (inherit) {
      if (pts.empty()) throw LadderError("no (QP, log-rate) point for " + resolutions[k].label);
      line.alpha = model.lines[k - 1].alpha;
      double sum = 0.0;
      for (const auto& [qp, lr] : pts) sum += qp - line.alpha * lr;
      line.beta = sum / static_cast<double>(pts.size());
    } else {
      if (pts.size() < 2) throw LadderError("need two (QP, log-rate) points for " + resolutions[k].label);
      double mx = 0.0, my = 0.0;
      for (const auto& [qp, lr] : pts) {
        mx += lr;
        my += qp;
      }
      mx /= static_cast<double>(pts.size());
      my /= static_cast<double>(pts.size());
      double sxx = 0.0, sxy = 0.0;
      for (const auto& [qp, lr] : pts) {
        sxx += (lr - mx) * (lr - mx);
        sxy += (lr - mx) * (qp - my);
      }
      if (!(sxx > 0.0)) throw LadderError("degenerate (QP, log-rate) points for " + resolutions[k].label);
      line.alpha = sxy / sxx;
      line.beta = my - line.alpha * mx;
    }
    model.lines.push_back(line);
  }
  return model;
}

CrossQPRelation fit_cross_relation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw LadderError("relation fit needs two or more paired values");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw LadderError("relation fit: constant predictor");
  CrossQPRelation r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  r.lcc = pearson(x, y);
  return r;
}

}  // namespace ladder
