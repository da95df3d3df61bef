#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "ladderkit/types.hpp"

namespace ladder {

/// Row-major sample plane; rows are image lines.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using SamplePlane = Plane<std::uint16_t>;

/// 4:2:0 frame. Chroma planes are half width/height (rounded up) and may be
/// empty when only luma is needed.
struct Frame {
  int bitDepth = 8;
  SamplePlane y;
  SamplePlane u;
  SamplePlane v;

  int width() const { return static_cast<int>(y.cols()); }
  int height() const { return static_cast<int>(y.rows()); }
  int peak() const { return (1 << bitDepth) - 1; }
  bool hasChroma() const { return u.size() > 0 && v.size() > 0; }

  /// Constant frame with neutral chroma.
  static Frame filled(int width, int height, int bitDepth, std::uint16_t luma);
  /// Wraps a luma plane; chroma set to mid-grey.
  static Frame from_luma(SamplePlane luma, int bitDepth);
};

/// Random-access sequence of frames. Implementations must allow concurrent
/// calls to frame().
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual int frameCount() const = 0;
  virtual Frame frame(int index) const = 0;
  virtual int width() const = 0;
  virtual int height() const = 0;
  virtual int bitDepth() const = 0;
  virtual double fps() const = 0;
};

class InMemorySequence : public FrameSource {
 public:
  InMemorySequence(std::vector<Frame> frames, double fps);

  int frameCount() const override { return static_cast<int>(frames_.size()); }
  Frame frame(int index) const override;
  int width() const override { return frames_.front().width(); }
  int height() const override { return frames_.front().height(); }
  int bitDepth() const override { return frames_.front().bitDepth; }
  double fps() const override { return fps_; }

  const std::vector<Frame>& frames() const { return frames_; }

 private:
  std::vector<Frame> frames_;
  double fps_;
};

struct YuvGeometry {
  int width = 0;
  int height = 0;
  int bitDepth = 8;
  double fps = 30.0;
  int frames = 0;  // 0 = all frames in the file
};

/// Planar 4:2:0 file (raw .yuv, or .y4m when the file starts with a
/// YUV4MPEG2 header). Samples above 8 bits are 16-bit little-endian.
class YuvFileSequence : public FrameSource {
 public:
  /// Raw files use `geometry` as given; for Y4M the header wins except for
  /// the frame limit.
  YuvFileSequence(std::filesystem::path path, YuvGeometry geometry);

  int frameCount() const override { return frameCount_; }
  Frame frame(int index) const override;
  int width() const override { return geo_.width; }
  int height() const override { return geo_.height; }
  int bitDepth() const override { return geo_.bitDepth; }
  double fps() const override { return geo_.fps; }

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  YuvGeometry geo_;
  bool y4m_ = false;
  std::uint64_t headerBytes_ = 0;
  std::uint64_t frameHeaderBytes_ = 0;
  int frameCount_ = 0;

  std::uint64_t frameBytes() const;
};

std::uint64_t frame_payload_bytes(int width, int height, int bitDepth);

/// Writes frames as raw planar 4:2:0.
void write_yuv(const std::filesystem::path& path, const std::vector<Frame>& frames);
void write_yuv(const std::filesystem::path& path, const FrameSource& source);

/// Loads every frame into memory.
InMemorySequence load_all(const FrameSource& source);

/// FNV-1a 64-bit digest of a file's bytes.
std::uint64_t file_digest(const std::filesystem::path& path);
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed = 1469598103934665603ULL);

}  // namespace ladder
