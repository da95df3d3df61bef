#include "ladderkit/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ladderkit/parallel.hpp"
#include "ladderkit/quality.hpp"
#include "ladderkit/resample.hpp"
#include "ladderkit/stats.hpp"

namespace ladder {

namespace {

const std::array<std::string, FeatureVector::kCount> kFeatureNames = {
    "meanGLCM_con", "meanGLCM_cor", "meanGLCM_hom", "meanGLCM_enr", "meanGLCM_ent",
    "stdGLCM_con",  "stdGLCM_cor",  "stdGLCM_hom",  "stdGLCM_enr",  "stdGLCM_ent",
    "meanTC_mean",  "meanTC_std",   "meanTC_skw",   "meanTC_kur",   "meanTC_entr",
    "stdTC_mean",   "stdTC_std",    "stdTC_skw",    "stdTC_kur",    "stdTC_entr",
    "RsMSE_1080p",  "RsMSE_720p",   "RsMSE_540p",   "QP_high_2160p", "QP_low_1080p",
    "QP_high_1080p", "QP_low_720p", "QP_high_720p"};

void check_index(int index) {
  if (index < 1 || index > FeatureVector::kCount) throw LadderError("feature index out of range");
}

std::array<double, 10> mean_and_std(const std::vector<std::array<double, 5>>& rows) {
  std::array<double, 10> out{};
  for (int k = 0; k < 5; ++k) {
    std::vector<double> col;
    for (const auto& r : rows) col.push_back(r[static_cast<std::size_t>(k)]);
    out[static_cast<std::size_t>(k)] = mean(col);
    out[static_cast<std::size_t>(k + 5)] = stddev(col);
  }
  return out;
}

}  // namespace

double FeatureVector::f(int index) const {
  check_index(index);
  if (!has(index)) throw LadderError("feature F" + std::to_string(index) + " missing");
  return values[static_cast<std::size_t>(index - 1)];
}

void FeatureVector::set(int index, double v) {
  check_index(index);
  values[static_cast<std::size_t>(index - 1)] = v;
  present.set(static_cast<std::size_t>(index - 1));
}

const std::string& FeatureVector::name(int index) {
  check_index(index);
  return kFeatureNames[static_cast<std::size_t>(index - 1)];
}

Eigen::MatrixXd glcm(const SamplePlane& luma, int bitDepth, GlcmOffset offset, int levels) {
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(levels, levels);
  const int h = static_cast<int>(luma.rows());
  const int w = static_cast<int>(luma.cols());
  auto level = [&](std::uint16_t s) {
    return std::min(levels - 1, static_cast<int>((static_cast<long>(s) * levels) >> bitDepth));
  };
  for (int r = 0; r < h; ++r) {
    const int r2 = r + offset.dy;
    if (r2 < 0 || r2 >= h) continue;
    for (int c = 0; c < w; ++c) {
      const int c2 = c + offset.dx;
      if (c2 < 0 || c2 >= w) continue;
      const int a = level(luma(r, c));
      const int b = level(luma(r2, c2));
      counts(a, b) += 1.0;
      counts(b, a) += 1.0;
    }
  }
  const double total = counts.sum();
  if (total > 0.0) counts /= total;
  return counts;
}

GlcmDescriptors glcm_descriptors(const Eigen::MatrixXd& p) {
  GlcmDescriptors d;
  const Eigen::Index n = p.rows();
  double mu = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) mu += static_cast<double>(i) * p(i, j);
  double var = 0.0, cov = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = p(i, j);
      if (v == 0.0) continue;
      const double di = static_cast<double>(i) - mu;
      const double dj = static_cast<double>(j) - mu;
      const double gap = static_cast<double>(i - j);
      d.contrast += gap * gap * v;
      d.homogeneity += v / (1.0 + gap * gap);
      d.energy += v * v;
      d.entropy -= v * std::log2(v);
      var += di * di * v;
      cov += di * dj * v;
    }
  }
  d.entropy += 0.0;  // no negative zero
  // flat texture: every pair identical, so treat as perfectly correlated
  d.correlation = var > 1e-12 ? std::clamp(cov / var, -1.0, 1.0) : 1.0;
  return d;
}

GlcmDescriptors frame_glcm(const Frame& frame) {
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(kGlcmLevels, kGlcmLevels);
  for (const auto& off : kGlcmOffsets) acc += glcm(frame.y, frame.bitDepth, off);
  acc /= static_cast<double>(kGlcmOffsets.size());
  return glcm_descriptors(acc);
}

std::array<double, 10> glcm_features(const FrameSource& seq, unsigned jobs) {
  std::vector<std::array<double, 5>> rows(static_cast<std::size_t>(seq.frameCount()));
  parallel_for(rows.size(), jobs, [&](std::size_t i) {
    const auto d = frame_glcm(seq.frame(static_cast<int>(i)));
    rows[i] = {d.contrast, d.correlation, d.homogeneity, d.energy, d.entropy};
  });
  return mean_and_std(rows);
}

double block_coherence(const SamplePlane& prev, const SamplePlane& cur, int row, int col, int size) {
  std::int64_t sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int r = row; r < row + size; ++r) {
    for (int c = col; c < col + size; ++c) {
      const std::int64_t x = prev(r, c);
      const std::int64_t y = cur(r, c);
      sx += x;
      sy += y;
      sxx += x * x;
      syy += y * y;
      sxy += x * y;
    }
  }
  const std::int64_t n = static_cast<std::int64_t>(size) * size;
  const std::int64_t vx = n * sxx - sx * sx;
  const std::int64_t vy = n * syy - sy * sy;
  const std::int64_t cxy = n * sxy - sx * sy;
  if (vx == 0 && vy == 0) return 1.0;
  if (vx == 0 || vy == 0) return 0.0;
  if (vx == vy && cxy == vx) return 1.0;
  return std::clamp(static_cast<double>(cxy) / (std::sqrt(static_cast<double>(vx)) * std::sqrt(static_cast<double>(vy))),
                    -1.0, 1.0);
}

std::vector<double> coherence_map(const Frame& prev, const Frame& cur) {
  if (prev.width() != cur.width() || prev.height() != cur.height())
    throw LadderError("coherence: frame size mismatch");
  const int bs = std::min({kCoherenceBlock, cur.width(), cur.height()});
  std::vector<double> map;
  for (int r = 0; r + bs <= cur.height(); r += bs)
    for (int c = 0; c + bs <= cur.width(); c += bs) map.push_back(block_coherence(prev.y, cur.y, r, c, bs));
  return map;
}

CoherenceStats coherence_stats(std::span<const double> map) {
  const Moments m = moments(map);
  return {m.mean, m.std, m.skewness, m.kurtosis, histogram_entropy(map, kCoherenceBins, -1.0, 1.0)};
}

std::array<double, 10> temporal_coherence_features(const FrameSource& seq, unsigned jobs) {
  if (seq.frameCount() < 2) throw LadderError("temporal coherence needs at least two frames");
  std::vector<std::array<double, 5>> rows(static_cast<std::size_t>(seq.frameCount() - 1));
  parallel_for(rows.size(), jobs, [&](std::size_t i) {
    const auto s = coherence_stats(coherence_map(seq.frame(static_cast<int>(i)), seq.frame(static_cast<int>(i + 1))));
    rows[i] = {s.mean, s.std, s.skewness, s.kurtosis, s.entropy};
  });
  return mean_and_std(rows);
}

double rsmse(const FrameSource& seq, int targetWidth, int targetHeight) {
  const Frame first = seq.frame(0);
  const SamplePlane down = lanczos3_resample(first.y, targetWidth, targetHeight, first.bitDepth);
  const SamplePlane up = lanczos3_resample(down, first.width(), first.height(), first.bitDepth);
  return mse(first.y, up);
}

double rsmse(const FrameSource& seq, const Resolution& target) { return rsmse(seq, target.width, target.height); }

FeatureVector extract_features(const FrameSource& seq, unsigned jobs) {
  FeatureVector fv;
  const auto g = glcm_features(seq, jobs);
  for (int k = 0; k < 10; ++k) fv.set(k + 1, g[static_cast<std::size_t>(k)]);
  const auto t = temporal_coherence_features(seq, jobs);
  for (int k = 0; k < 10; ++k) fv.set(k + 11, t[static_cast<std::size_t>(k)]);
  for (int k = 0; k < 3; ++k) {
    const int factor = kRsmseFactors[static_cast<std::size_t>(k)];
    const int w = std::max(1, static_cast<int>(std::lround(static_cast<double>(seq.width()) / factor)));
    const int h = std::max(1, static_cast<int>(std::lround(static_cast<double>(seq.height()) / factor)));
    fv.set(21 + k, rsmse(seq, w, h));
  }
  for (int k = 1; k <= FeatureVector::kContent; ++k)
    if (!std::isfinite(fv.f(k))) throw LadderError("non-finite feature F" + std::to_string(k));
  return fv;
}

// ---- descriptors -----------------------------------------------------------

namespace {

Plane<double> to_8bit_scale(const SamplePlane& p, int bitDepth) {
  return p.cast<double>() * (255.0 / ((1 << bitDepth) - 1));
}

double plane_std(const Plane<double>& p) {
  if (p.size() == 0) return 0.0;
  const double m = p.mean();
  return std::sqrt((p - m).square().mean());
}

}  // namespace

double spatial_information(const Frame& frame) {
  const Plane<double> y = to_8bit_scale(frame.y, frame.bitDepth);
  const Eigen::Index h = y.rows(), w = y.cols();
  if (h < 3 || w < 3) return 0.0;
  Plane<double> mag(h - 2, w - 2);
  for (Eigen::Index r = 1; r < h - 1; ++r) {
    for (Eigen::Index c = 1; c < w - 1; ++c) {
      const double gx = (y(r - 1, c + 1) + 2 * y(r, c + 1) + y(r + 1, c + 1)) -
                        (y(r - 1, c - 1) + 2 * y(r, c - 1) + y(r + 1, c - 1));
      const double gy = (y(r + 1, c - 1) + 2 * y(r + 1, c) + y(r + 1, c + 1)) -
                        (y(r - 1, c - 1) + 2 * y(r - 1, c) + y(r - 1, c + 1));
      mag(r - 1, c - 1) = std::sqrt(gx * gx + gy * gy);
    }
  }
  return plane_std(mag);
}

double temporal_information(const Frame& prev, const Frame& cur) {
  return plane_std(to_8bit_scale(cur.y, cur.bitDepth) - to_8bit_scale(prev.y, prev.bitDepth));
}

double motion_magnitude(const Frame& prev, const Frame& cur, int* texturedBlocks) {
  const int h = cur.height(), w = cur.width();
  const int bs = kMotionBlock;
  double total = 0.0;
  int count = 0;
  for (int by = 0; by + bs <= h; by += bs) {
    for (int bx = 0; bx + bs <= w; bx += bs) {
      const auto block = cur.y.block(by, bx, bs, bs);
      if ((block == block(0, 0)).all()) continue;  // flat: motion undefined
      std::int64_t bestSad = std::numeric_limits<std::int64_t>::max();
      int bestMag2 = 0;
      for (int dy = -kMotionRange; dy <= kMotionRange; ++dy) {
        const int ry = by + dy;
        if (ry < 0 || ry + bs > h) continue;
        for (int dx = -kMotionRange; dx <= kMotionRange; ++dx) {
          const int rx = bx + dx;
          if (rx < 0 || rx + bs > w) continue;
          std::int64_t sad = 0;
          for (int r = 0; r < bs && sad <= bestSad; ++r)
            for (int c = 0; c < bs; ++c)
              sad += std::abs(static_cast<int>(cur.y(by + r, bx + c)) - static_cast<int>(prev.y(ry + r, rx + c)));
          const int mag2 = dx * dx + dy * dy;
          if (sad < bestSad || (sad == bestSad && mag2 < bestMag2)) {
            bestSad = sad;
            bestMag2 = mag2;
          }
        }
      }
      total += std::sqrt(static_cast<double>(bestMag2));
      ++count;
    }
  }
  if (texturedBlocks) *texturedBlocks = count;
  return count > 0 ? total / count : 0.0;
}

double colourfulness(const Frame& frame) {
  if (!frame.hasChroma()) return 0.0;
  const double peak = frame.peak();
  const double scale = 255.0 / peak;
  const double lumaOff = 16.0 * (peak + 1) / 256.0;
  const double lumaRange = 219.0 * (peak + 1) / 256.0;
  const double chromaMid = (peak + 1) / 2.0;
  const double chromaRange = 224.0 * (peak + 1) / 256.0;
  const int h = frame.height(), w = frame.width();
  const double n = static_cast<double>(h) * w;
  double srg = 0, srg2 = 0, syb = 0, syb2 = 0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      // BT.709 limited range, nearest chroma
      const double Y = (frame.y(r, c) - lumaOff) / lumaRange;
      const double Cb = (frame.u(r / 2, c / 2) - chromaMid) / chromaRange;
      const double Cr = (frame.v(r / 2, c / 2) - chromaMid) / chromaRange;
      const double R = (Y + 1.5748 * Cr) * peak * scale;
      const double G = (Y - 0.1873 * Cb - 0.4681 * Cr) * peak * scale;
      const double B = (Y + 1.8556 * Cb) * peak * scale;
      const double rg = R - G;
      const double yb = 0.5 * (R + G) - B;
      srg += rg;
      srg2 += rg * rg;
      syb += yb;
      syb2 += yb * yb;
    }
  }
  const double mrg = srg / n, myb = syb / n;
  const double vrg = std::max(0.0, srg2 / n - mrg * mrg);
  const double vyb = std::max(0.0, syb2 / n - myb * myb);
  return std::sqrt(vrg + vyb) + 0.3 * std::sqrt(mrg * mrg + myb * myb);
}

DatasetDescriptor dataset_descriptors(const FrameSource& seq, unsigned jobs) {
  const int n = seq.frameCount();
  std::vector<double> si(static_cast<std::size_t>(n)), cf(static_cast<std::size_t>(n));
  std::vector<double> ti(static_cast<std::size_t>(std::max(0, n - 1)));
  std::vector<double> mvSum(ti.size());
  std::vector<int> mvCount(ti.size());
  parallel_for(static_cast<std::size_t>(n), jobs, [&](std::size_t i) {
    const Frame cur = seq.frame(static_cast<int>(i));
    si[i] = spatial_information(cur);
    cf[i] = colourfulness(cur);
    if (i > 0) {
      const Frame prev = seq.frame(static_cast<int>(i - 1));
      ti[i - 1] = temporal_information(prev, cur);
      int blocks = 0;
      const double m = motion_magnitude(prev, cur, &blocks);
      mvSum[i - 1] = m * blocks;
      mvCount[i - 1] = blocks;
    }
  });
  DatasetDescriptor d;
  d.si = *std::max_element(si.begin(), si.end());
  d.cf = mean(cf);
  if (!ti.empty()) d.ti = *std::max_element(ti.begin(), ti.end());
  double total = 0.0;
  int blocks = 0;
  for (std::size_t i = 0; i < mvSum.size(); ++i) {
    total += mvSum[i];
    blocks += mvCount[i];
  }
  d.mv = blocks > 0 ? total / blocks : 0.0;
  return d;
}

}  // namespace ladder
