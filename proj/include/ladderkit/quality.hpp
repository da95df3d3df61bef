#pragma once

#include <vector>

#include "ladderkit/frame.hpp"

namespace ladder {

/// Identical content has infinite PSNR; it is reported as this cap.
inline constexpr double kPsnrCapDb = 100.0;

struct PsnrReport {
  std::vector<double> gopDb;  // one per GoP, from the GoP-averaged MSE
  double meanDb = 0.0;        // mean of the GoP values
};

double mse(const SamplePlane& a, const SamplePlane& b);

double psnr_from_mse(double mse, int bitDepth, double capDb = kPsnrCapDb);

/// Luma PSNR at the reference's resolution, aggregated per GoP.
PsnrReport psnr(const FrameSource& reference, const FrameSource& distorted, int gopLength = 16,
                double capDb = kPsnrCapDb);

}  // namespace ladder
