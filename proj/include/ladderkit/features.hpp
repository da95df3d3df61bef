#pragma once

#include <Eigen/Core>

#include <array>
#include <bitset>
#include <optional>
#include <span>
#include <string>

#include "ladderkit/frame.hpp"

namespace ladder {

/// F1..F28. F1-F10 GLCM statistics, F11-F20 temporal coherence statistics,
/// F21-F23 rescaling MSE, F24-F28 predicted cross-over QPs.
struct FeatureVector {
  static constexpr int kCount = 28;
  static constexpr int kContent = 23;  // F1..F23 come from the pixels

  std::array<double, kCount> values{};
  std::bitset<kCount> present;

  /// 1-based accessors matching the F-numbering.
  double f(int index) const;
  void set(int index, double v);
  bool has(int index) const { return present.test(static_cast<std::size_t>(index - 1)); }

  static const std::string& name(int index);
};

// ---- GLCM ----------------------------------------------------------------

struct GlcmOffset {
  int dy;
  int dx;
};

inline constexpr int kGlcmLevels = 32;
inline constexpr std::array<GlcmOffset, 4> kGlcmOffsets{{{0, 1}, {1, 0}, {1, 1}, {1, -1}}};

/// Normalized symmetric co-occurrence matrix of the luma plane quantized to
/// `levels` grey levels (top bits of each sample).
Eigen::MatrixXd glcm(const SamplePlane& luma, int bitDepth, GlcmOffset offset, int levels = kGlcmLevels);

struct GlcmDescriptors {
  double contrast = 0.0;
  double correlation = 0.0;
  double homogeneity = 0.0;
  double energy = 0.0;
  double entropy = 0.0;
};

GlcmDescriptors glcm_descriptors(const Eigen::MatrixXd& p);

/// Descriptors of the GLCM averaged over the four standard offsets.
GlcmDescriptors frame_glcm(const Frame& frame);

/// F1..F10: per-descriptor mean and standard deviation across frames.
std::array<double, 10> glcm_features(const FrameSource& seq, unsigned jobs = 1);

// ---- Temporal coherence --------------------------------------------------

inline constexpr int kCoherenceBlock = 32;
inline constexpr int kCoherenceBins = 64;

/// Zero-mean normalized cross-correlation of co-located blocks. Two flat
/// blocks count as fully coherent; one flat block against a textured one as 0.
double block_coherence(const SamplePlane& prev, const SamplePlane& cur, int row, int col, int size);

/// Coherence map (row-major blocks) between two frames.
std::vector<double> coherence_map(const Frame& prev, const Frame& cur);

struct CoherenceStats {
  double mean = 0.0;
  double std = 0.0;
  double skewness = 0.0;
  double kurtosis = 3.0;
  double entropy = 0.0;
};

CoherenceStats coherence_stats(std::span<const double> map);

/// F11..F20. Needs at least two frames.
std::array<double, 10> temporal_coherence_features(const FrameSource& seq, unsigned jobs = 1);

// ---- Rescaling MSE -------------------------------------------------------

/// MSE between the first luma frame and its Lanczos-3 down-then-up copy.
double rsmse(const FrameSource& seq, int targetWidth, int targetHeight);
double rsmse(const FrameSource& seq, const Resolution& target);

/// F21..F23 use these downscale factors relative to the native size.
inline constexpr std::array<int, 3> kRsmseFactors{2, 3, 4};

// ---- Whole vector --------------------------------------------------------

/// F1..F23 from the unscaled source.
FeatureVector extract_features(const FrameSource& seq, unsigned jobs = 1);

// ---- Dataset descriptors -------------------------------------------------

struct DatasetDescriptor {
  double si = 0.0;
  double ti = 0.0;
  double mv = 0.0;
  double cf = 0.0;
};

inline constexpr int kMotionBlock = 16;
inline constexpr int kMotionRange = 16;

double spatial_information(const Frame& frame);
double temporal_information(const Frame& prev, const Frame& cur);
/// Mean full-pel motion-vector magnitude of the textured 16x16 blocks of
/// `cur`, matched exhaustively (SAD) against `prev`.
double motion_magnitude(const Frame& prev, const Frame& cur, int* texturedBlocks = nullptr);
double colourfulness(const Frame& frame);

DatasetDescriptor dataset_descriptors(const FrameSource& seq, unsigned jobs = 1);

}  // namespace ladder
