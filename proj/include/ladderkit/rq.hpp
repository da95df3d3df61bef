#pragma once

#include <span>
#include <vector>

#include "ladderkit/types.hpp"

namespace ladder {

/// Non-dominated subset of `points` under (maximize quality, minimize rate),
/// sorted by rate. Equal rate keeps the best quality; an exact (rate, quality)
/// duplicate keeps the lower resolution.
ParetoFront build_pareto_front(std::span<const RQPoint> points);

/// Drops points that are dominated within their own curve (rate-control
/// noise) and returns the rest sorted by log-rate. Reports how many were
/// dropped through `dropped` when given.
std::vector<RQPoint> monotone_curve_points(const RQCurve& curve, int* dropped = nullptr);

/// Highest-rate crossing of every adjacent-resolution pair, found on PCHIP
/// interpolants of quality over log-rate. Pairs whose curves never cross in
/// their shared rate range are absent from the result.
std::vector<CrossOverPair> find_intersections(std::span<const RQCurve> curves);

/// Trims the front to [rMin, rMax], walks it in rate-doubling steps and stops
/// once a rung exceeds qMax or adds no more than epsilon dB per octave.
BitrateLadder build_reference_ladder(const ParetoFront& front, const LadderConfig& cfg);

/// Sorts rungs by rate, keeps only strictly increasing quality, then removes
/// rungs lying more than `toleranceDb` below the chord of their neighbours
/// until none remain. Idempotent.
BitrateLadder repair_ladder(BitrateLadder ladder, double toleranceDb = LadderConfig{}.concavityToleranceDb);

/// The monotonicity half of repair_ladder on its own.
BitrateLadder enforce_monotone(BitrateLadder ladder);

/// Gathers every point of every curve.
std::vector<RQPoint> flatten(std::span<const RQCurve> curves);

Rung to_rung(const RQPoint& p, double targetRate);

}  // namespace ladder
