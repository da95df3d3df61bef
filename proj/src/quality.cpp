#include "ladderkit/quality.hpp"

#include <cmath>

namespace ladder {

double mse(const SamplePlane& a, const SamplePlane& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw LadderError("mse: dimension mismatch");
  const auto d = a.cast<double>() - b.cast<double>();
  return (d * d).mean();
}

double psnr_from_mse(double mse, int bitDepth, double capDb) {
  if (mse <= 0.0) return capDb;
  const double peak = (1 << bitDepth) - 1;
  return std::min(capDb, 10.0 * std::log10(peak * peak / mse));
}

PsnrReport psnr(const FrameSource& reference, const FrameSource& distorted, int gopLength, double capDb) {
  if (reference.width() != distorted.width() || reference.height() != distorted.height())
    throw LadderError("psnr: dimension mismatch");
  if (reference.bitDepth() != distorted.bitDepth()) throw LadderError("psnr: bit depth mismatch");
  if (reference.frameCount() != distorted.frameCount()) throw LadderError("psnr: frame count mismatch");
  if (gopLength <= 0) throw LadderError("psnr: GoP length must be positive");

  PsnrReport report;
  const int n = reference.frameCount();
  for (int start = 0; start < n; start += gopLength) {
    const int end = std::min(n, start + gopLength);
    double acc = 0.0;
    for (int i = start; i < end; ++i) acc += mse(reference.frame(i).y, distorted.frame(i).y);
    report.gopDb.push_back(psnr_from_mse(acc / (end - start), reference.bitDepth(), capDb));
  }
  double sum = 0.0;
  for (double v : report.gopDb) sum += v;
  report.meanDb = sum / static_cast<double>(report.gopDb.size());
  return report;
}

}  // namespace ladder
