#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ladderkit/encode.hpp"
#include "ladderkit/features.hpp"
#include "ladderkit/learn.hpp"
#include "ladderkit/selector.hpp"
#include "ladderkit/types.hpp"

namespace ladder {

/// Distinct encodes a method asked for. `backendCalls` is what the adapter
/// actually ran, which is lower when earlier work is cached.
struct EncodeBudget {
  int initialEncodes = 0;
  int rungEncodes = 0;  // rung encodes outside the initial set
  long backendCalls = 0;

  int total() const { return initialEncodes + rungEncodes; }
};

struct ILConfig {
  int samples = 7;  // QPs per resolution
};

/// Evenly spaced integers over the range, both ends included.
std::vector<int> il_sample_qps(const QpRange& qps, int samples);

struct MethodContext {
  EncodeAdapter* adapter = nullptr;
  ResolutionSet resolutions = default_resolutions();
  QpRange qps;
  LadderConfig ladder;
  std::string profile = "RA";
};

struct MethodOutcome {
  BitrateLadder ladder;
  EncodeBudget budget;
  LadderMethod ran = LadderMethod::RL;  // branch actually executed (differs from ladder.method for HL)
  std::optional<ParetoFront> front;     // RL: measured, IL: interpolated
  std::vector<CrossOverPair> crossovers;
  std::vector<int> predictedQps;        // FL
  std::optional<QPLogRateModel> rateModel;
  std::vector<double> switchRates;      // FL, one per adjacent pair
};

/// Exhaustive sweep, Pareto front and reference ladder.
MethodOutcome run_rl(const MethodContext& ctx, const std::string& sequenceId);

/// Sparse QP sweep, PCHIP over QP for log-rate and quality, ladder on the
/// interpolated front, then one true encode per rung.
MethodOutcome run_il(const MethodContext& ctx, const std::string& sequenceId, const ILConfig& il = {});

/// Predicted cross-over QPs, 2|S|-1 encodes, QP/log-rate lines, switching
/// bitrates and one encode per rung. Falls back to IL when a line fit fails.
MethodOutcome run_fl(const MethodContext& ctx, const std::string& sequenceId, const FeatureVector& features,
                     const CrossoverPredictor& predictor, const ILConfig& fallback = {});

/// Runs whichever of IL and FL the selector picks.
MethodOutcome run_hl(const MethodContext& ctx, const std::string& sequenceId, const FeatureVector& features,
                     const MethodSelector& selector, const CrossoverPredictor& predictor, const ILConfig& il = {});

/// Stops the ladder at the first rung above qMax or gaining no more than
/// epsilon dB per octave over the previous rung, and drops rungs outside
/// [rMin, rMax].
BitrateLadder apply_ladder_limits(BitrateLadder ladder, const LadderConfig& cfg);

}  // namespace ladder
