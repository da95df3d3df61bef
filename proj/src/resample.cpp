#include "ladderkit/resample.hpp"

namespace ladder {

SamplePlane lanczos3_resample(const SamplePlane& src, int width, int height, int bitDepth) {
  if (src.cols() == width && src.rows() == height) {
    if (width <= 0 || height <= 0) throw LadderError("resample: zero-dimension target");
    return src;
  }
  const Plane<double> out = lanczos3_resample<double>(src.cast<double>(), width, height);
  const double peak = (1 << bitDepth) - 1;
  return out.round().max(0.0).min(peak).cast<std::uint16_t>();
}

Frame lanczos3_resample(const Frame& frame, int width, int height) {
  Frame out;
  out.bitDepth = frame.bitDepth;
  out.y = lanczos3_resample(frame.y, width, height, frame.bitDepth);
  if (frame.hasChroma()) {
    out.u = lanczos3_resample(frame.u, (width + 1) / 2, (height + 1) / 2, frame.bitDepth);
    out.v = lanczos3_resample(frame.v, (width + 1) / 2, (height + 1) / 2, frame.bitDepth);
  }
  return out;
}

Frame lanczos3_resample(const Frame& frame, const Resolution& target) {
  return lanczos3_resample(frame, target.width, target.height);
}

}  // namespace ladder
