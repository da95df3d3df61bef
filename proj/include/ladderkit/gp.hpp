#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>

namespace ladder {

/// Log-space hyperparameters of an RBF kernel plus Gaussian noise.
struct GpHyper {
  double logLength = 0.0;
  double logSignal = 0.0;  // log sigma_f
  double logNoise = -2.0;  // log sigma_n; ignored when the noise is fixed
};

struct GpOptions {
  int restarts = 5;
  std::uint64_t seed = 1;
  /// When false the noise variance stays at `fixedNoiseVariance`.
  bool fitNoise = true;
  double fixedNoiseVariance = 0.0;
  int maxIterations = 200;
  double jitter = 1e-8;
  double maxJitter = 1e-4;
};

/// Minimizes f from x0 with the Nelder-Mead simplex; returns the best point.
Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x0, double step,
                            int maxIterations, double tolerance = 1e-7);

/// Exact GP regression with a single-length-scale RBF kernel on
/// standardized inputs and targets.
class GaussianProcess {
 public:
  /// Standardizes, then picks hyperparameters by maximizing the marginal
  /// likelihood (multi-start) unless `fixed` is given.
  void fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const GpOptions& options,
           const GpHyper* start = nullptr, const GpHyper* fixed = nullptr);

  double predict(const Eigen::RowVectorXd& x) const;
  /// One prediction per row.
  Eigen::VectorXd predict_rows(const Eigen::MatrixXd& x) const;

  const GpHyper& hyper() const { return hyper_; }
  double noiseVariance() const { return noiseVar_; }
  double jitter() const { return jitter_; }
  double negLogMarginal() const { return nlml_; }
  bool fitted() const { return weights_.size() > 0; }

  // Raw state, for serialization.
  struct State {
    Eigen::RowVectorXd xMean, xScale;
    double yMean = 0.0, yScale = 1.0;
    Eigen::MatrixXd xs;        // standardized training inputs
    Eigen::VectorXd weights;   // (K + noise I)^-1 y, standardized units
    GpHyper hyper;
    double noiseVariance = 0.0;
    double jitter = 0.0;
  };
  State state() const;
  static GaussianProcess from_state(const State& s);

 private:
  Eigen::RowVectorXd xMean_, xScale_;
  double yMean_ = 0.0, yScale_ = 1.0;
  Eigen::MatrixXd xs_;
  Eigen::VectorXd weights_;
  GpHyper hyper_;
  double noiseVar_ = 0.0;
  double jitter_ = 0.0;
  double nlml_ = 0.0;
};

}  // namespace ladder
