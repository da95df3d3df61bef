#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ladderkit/encode.hpp"
#include "ladderkit/features.hpp"

namespace ladder {

/// Cross-over QP names in prediction order: for each adjacent pair, the high
/// level on the larger resolution, then the low level on the smaller one.
/// Four resolutions give six names, e.g. "qp_high_2160p", "qp_low_1080p".
std::vector<std::string> crossover_names(const ResolutionSet& resolutions);

/// One sequence of the linear oracle: analytic RQ lines per resolution that
/// cross once per adjacent pair inside the default QP range, and a feature
/// vector driven by the same two latent variables.
struct OracleSequence {
  std::string id;
  double u = 0.0;
  double v = 0.0;
  SyntheticModel model;
  std::vector<double> crossLogRate;  // one per adjacent pair
  std::vector<double> crossQp;       // continuous, in crossover_names() order
  FeatureVector features;            // F1..F23
};

struct OracleOptions {
  int count = 30;
  std::uint64_t seed = 1;
  std::string prefix = "syn";
};

/// Needs exactly four resolutions.
std::vector<OracleSequence> make_oracle_corpus(const OracleOptions& options,
                                               const ResolutionSet& resolutions = default_resolutions());

std::map<std::string, SyntheticModel> oracle_models(const std::vector<OracleSequence>& corpus);

/// CSV columns: sequence_id, resolution, width, height, alpha, beta, q0, q1.
void write_synthetic_models(const std::filesystem::path& path, const std::map<std::string, SyntheticModel>& models,
                            const ResolutionSet& resolutions);
std::map<std::string, SyntheticModel> read_synthetic_models(const std::filesystem::path& path);

/// Intersection of two synthetic lines in log-rate, or NaN when parallel.
double analytic_crossing(const ResolutionModel& hi, const ResolutionModel& lo);

}  // namespace ladder
