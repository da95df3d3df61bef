#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ladderkit/encode.hpp"
#include "ladderkit/frame.hpp"
#include "ladderkit/learn.hpp"
#include "ladderkit/synthetic.hpp"
#include "ladderkit/types.hpp"

namespace ladder::testing {

/// O(n^2) dominance filter: keep p unless some q has rate <= and quality >=
/// with one strict. Equal (rate, quality) pairs keep the lower resolution, then the higher QP.
inline std::vector<RQPoint> brute_force_front(const std::vector<RQPoint>& pts) {
  std::vector<RQPoint> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      if (i == j) continue;
      const auto& p = pts[i];
      const auto& q = pts[j];
      const bool weakly = q.rate <= p.rate && q.quality >= p.quality;
      const bool strictly = q.rate < p.rate || q.quality > p.quality;
      if (weakly && strictly) dominated = true;
      if (q.rate == p.rate && q.quality == p.quality) {
        if (q.resolution.pixels() < p.resolution.pixels()) dominated = true;
        if (q.resolution.pixels() == p.resolution.pixels() && q.qp > p.qp) dominated = true;
        if (q.resolution.pixels() == p.resolution.pixels() && q.qp == p.qp && j < i) dominated = true;
      }
    }
    if (!dominated) out.push_back(pts[i]);
  }
  std::sort(out.begin(), out.end(), [](const RQPoint& a, const RQPoint& b) { return a.rate < b.rate; });
  return out;
}

/// Curves of a linear model over a QP list.
inline std::vector<RQCurve> model_curves(const SyntheticModel& m, const ResolutionSet& res, const std::vector<int>& qps) {
  std::vector<RQCurve> curves;
  for (const auto& r : res) {
    RQCurve c{r, {}};
    for (int qp : qps) c.points.push_back(RQPoint::make(m.at(r).rate(qp), m.at(r).quality(qp), qp, r));
    curves.push_back(std::move(c));
  }
  return curves;
}

/// Ladder from (rate, quality) pairs on one resolution.
inline BitrateLadder make_ladder(const std::vector<std::pair<double, double>>& rq,
                                 const Resolution& res = {1920, 1080, "1080p"}) {
  BitrateLadder l;
  int qp = 45;
  for (const auto& [rate, q] : rq) {
    Rung r;
    r.rate = r.targetRate = rate;
    r.logRate = std::log2(rate);
    r.quality = q;
    r.qp = qp--;
    r.resolution = res;
    l.rungs.push_back(r);
  }
  return l;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("ladderkit-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Rounded cross-over QPs of each oracle sequence, in prediction order.
inline std::vector<std::vector<double>> oracle_truths(const std::vector<OracleSequence>& corpus) {
  std::vector<std::vector<double>> out;
  for (const auto& s : corpus) {
    std::vector<double> t;
    for (double q : s.crossQp) t.push_back(std::round(q));
    out.push_back(t);
  }
  return out;
}

inline TrainResult train_on_oracle(const std::vector<OracleSequence>& corpus, const TrainOptions& options) {
  std::vector<FeatureVector> fv;
  for (const auto& s : corpus) fv.push_back(s.features);
  return train_crossover_predictor(fv, oracle_truths(corpus), crossover_names(default_resolutions()), options);
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Small noisy 8-bit 72x48 clips plus manifest.csv in `dir`.
inline std::filesystem::path write_clips(const std::filesystem::path& dir, int count) {
  std::ofstream m(dir / "manifest.csv");
  m << "id,path,width,height,fps,bit_depth,frames\n";
  std::mt19937_64 rng(11);
  for (int c = 0; c < count; ++c) {
    std::vector<Frame> frames;
    std::uniform_int_distribution<int> d(0, 40 + 50 * c);
    for (int f = 0; f < 5; ++f) {
      SamplePlane p(48, 72);
      for (Eigen::Index y = 0; y < p.rows(); ++y)
        for (Eigen::Index x = 0; x < p.cols(); ++x)
          p(y, x) = static_cast<std::uint16_t>(std::min<int>(255, static_cast<int>(2 * x + f * c) + d(rng)));
      frames.push_back(Frame::from_luma(p, 8));
    }
    const std::string name = "clip" + std::to_string(c) + ".yuv";
    write_yuv(dir / name, frames);
    m << "clip" << c << "," << name << ",72,48,30,8,0\n";
  }
  return dir / "manifest.csv";
}

}  // namespace ladder::testing
