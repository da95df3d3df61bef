#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "ladderkit/frame.hpp"

namespace ladder {

inline double lanczos_kernel(double x, int a = 3) {
  if (x == 0.0) return 1.0;
  if (std::abs(x) >= a) return 0.0;
  const double px = std::numbers::pi * x;
  return a * std::sin(px) * std::sin(px / a) / (px * px);
}

/// Normalized filter taps mapping `srcSize` samples onto `dstSize`, with
/// pixel centres aligned and the kernel widened when downscaling.
struct ResampleTaps {
  std::vector<int> first;               // first source index per output
  std::vector<std::vector<double>> w;   // weights (clamped-edge indexing)

  static ResampleTaps make(int srcSize, int dstSize, int a = 3) {
    ResampleTaps taps;
    const double scale = static_cast<double>(srcSize) / dstSize;
    const double stretch = scale > 1.0 ? scale : 1.0;
    const double support = a * stretch;
    taps.first.resize(static_cast<std::size_t>(dstSize));
    taps.w.resize(static_cast<std::size_t>(dstSize));
    for (int o = 0; o < dstSize; ++o) {
      const double centre = (o + 0.5) * scale - 0.5;
      const int lo = static_cast<int>(std::floor(centre - support)) + 1;
      const int hi = static_cast<int>(std::ceil(centre + support)) - 1;
      std::vector<double> w;
      double sum = 0.0;
      for (int i = lo; i <= hi; ++i) {
        const double v = lanczos_kernel((i - centre) / stretch, a);
        w.push_back(v);
        sum += v;
      }
      for (double& v : w) v /= sum;
      taps.first[static_cast<std::size_t>(o)] = lo;
      taps.w[static_cast<std::size_t>(o)] = std::move(w);
    }
    return taps;
  }
};

/// Separable Lanczos resampling, horizontal pass then vertical. Linear in
/// its input; same-size input is returned unchanged.
template <typename Scalar>
Plane<Scalar> lanczos3_resample(const Plane<Scalar>& src, int width, int height) {
  if (width <= 0 || height <= 0) throw LadderError("resample: zero-dimension target");
  const int sw = static_cast<int>(src.cols());
  const int sh = static_cast<int>(src.rows());
  if (sw == width && sh == height) return src;

  auto clampi = [](int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); };

  const auto hx = ResampleTaps::make(sw, width);
  Plane<Scalar> tmp(sh, width);
  for (int r = 0; r < sh; ++r) {
    for (int c = 0; c < width; ++c) {
      const auto& w = hx.w[static_cast<std::size_t>(c)];
      const int lo = hx.first[static_cast<std::size_t>(c)];
      double acc = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * static_cast<double>(src(r, clampi(lo + static_cast<int>(k), sw)));
      tmp(r, c) = static_cast<Scalar>(acc);
    }
  }

  const auto vy = ResampleTaps::make(sh, height);
  Plane<Scalar> out(height, width);
  for (int r = 0; r < height; ++r) {
    const auto& w = vy.w[static_cast<std::size_t>(r)];
    const int lo = vy.first[static_cast<std::size_t>(r)];
    for (int c = 0; c < width; ++c) {
      double acc = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * static_cast<double>(tmp(clampi(lo + static_cast<int>(k), sh), c));
      out(r, c) = static_cast<Scalar>(acc);
    }
  }
  return out;
}

/// Resamples a sample plane with rounding and clipping to [0, peak].
SamplePlane lanczos3_resample(const SamplePlane& src, int width, int height, int bitDepth);

/// Resamples luma to `target` and chroma to half of it.
Frame lanczos3_resample(const Frame& frame, const Resolution& target);
Frame lanczos3_resample(const Frame& frame, int width, int height);

}  // namespace ladder
