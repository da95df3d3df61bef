#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "ladderkit/features.hpp"
#include "ladderkit/frame.hpp"
#include "ladderkit/quality.hpp"
#include "ladderkit/resample.hpp"
#include "support.hpp"

using namespace ladder;

namespace {

SamplePlane noise_plane(int w, int h, int peak, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(0, peak);
  SamplePlane p(h, w);
  for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = static_cast<std::uint16_t>(d(rng));
  return p;
}

SamplePlane checkerboard(int w, int h, std::uint16_t a, std::uint16_t b) {
  SamplePlane p(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) p(r, c) = ((r + c) % 2 == 0) ? a : b;
  return p;
}

InMemorySequence repeat(const Frame& f, int n) { return InMemorySequence(std::vector<Frame>(static_cast<std::size_t>(n), f), 30.0); }

// Independent 2-D Lanczos-3: product of unnormalized 1-D kernels, each axis
// renormalized, edges clamped.
Plane<double> direct_lanczos(const Plane<double>& src, int w, int h) {
  const int sw = static_cast<int>(src.cols()), sh = static_cast<int>(src.rows());
  auto weights = [](int srcN, int dstN, int o, std::vector<int>& idx, std::vector<double>& wt) {
    const double scale = static_cast<double>(srcN) / dstN;
    const double stretch = std::max(1.0, scale);
    const double centre = (o + 0.5) * scale - 0.5;
    idx.clear();
    wt.clear();
    double sum = 0.0;
    for (int i = static_cast<int>(std::floor(centre - 3 * stretch)); i <= static_cast<int>(std::ceil(centre + 3 * stretch)); ++i) {
      const double x = (i - centre) / stretch;
      double k = 0.0;
      if (x == 0.0) k = 1.0;
      else if (std::abs(x) < 3.0) k = 3.0 * std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * x / 3.0) / (std::numbers::pi * std::numbers::pi * x * x);
      idx.push_back(std::clamp(i, 0, srcN - 1));
      wt.push_back(k);
      sum += k;
    }
    for (double& v : wt) v /= sum;
  };
  Plane<double> out(h, w);
  std::vector<int> ix, iy;
  std::vector<double> wx, wy;
  for (int r = 0; r < h; ++r) {
    weights(sh, h, r, iy, wy);
    for (int c = 0; c < w; ++c) {
      weights(sw, w, c, ix, wx);
      double acc = 0.0;
      for (std::size_t a = 0; a < iy.size(); ++a)
        for (std::size_t b = 0; b < ix.size(); ++b) acc += wy[a] * wx[b] * src(iy[a], ix[b]);
      out(r, c) = acc;
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("resample") {
  TEST_CASE("constant frames stay constant at any scale") {
    const Frame f = Frame::filled(96, 64, 8, 117);
    for (auto [w, h] : {std::pair{48, 32}, {32, 21}, {150, 100}, {17, 9}}) {
      const Frame g = lanczos3_resample(f, w, h);
      CHECK(g.width() == w);
      CHECK(g.height() == h);
      CHECK((g.y == 117).all());
      CHECK((g.u == 128).all());
    }
  }

  TEST_CASE("same size is bit-exact") {
    const SamplePlane p = noise_plane(40, 24, 1023, 3);
    CHECK((lanczos3_resample(p, 40, 24, 10) == p).all());
  }

  TEST_CASE("matches a direct convolution on an impulse") {
    Plane<double> img = Plane<double>::Zero(64, 64);
    img(31, 29) = 1000.0;
    const Plane<double> down = lanczos3_resample(img, 32, 32);
    CHECK((down - direct_lanczos(img, 32, 32)).abs().maxCoeff() < 1e-9);
    const Plane<double> up = lanczos3_resample(down, 64, 64);
    CHECK((up - direct_lanczos(down, 64, 64)).abs().maxCoeff() < 1e-9);
    Eigen::Index r = 0, c = 0;
    up.maxCoeff(&r, &c);
    CHECK(std::abs(r - 31) <= 1);
    CHECK(std::abs(c - 29) <= 1);
  }

  TEST_CASE("symmetric ringing around a centred impulse") {
    Plane<double> img = Plane<double>::Zero(16, 16);
    img(7, 7) = img(7, 8) = img(8, 7) = img(8, 8) = 1.0;
    const Plane<double> up = lanczos3_resample(lanczos3_resample(img, 8, 8), 16, 16);
    CHECK((up - up.rowwise().reverse()).abs().maxCoeff() < 1e-12);
    CHECK((up - up.colwise().reverse()).abs().maxCoeff() < 1e-12);
    CHECK(up.minCoeff() < 0.0);  // negative lobes
  }

  TEST_CASE("resampling is linear") {
    const Plane<double> a = noise_plane(30, 20, 255, 1).cast<double>();
    const Plane<double> b = noise_plane(30, 20, 255, 2).cast<double>();
    const Plane<double> lhs = lanczos3_resample<double>(2.0 * a + 3.0 * b, 13, 9);
    const Plane<double> rhs = 2.0 * lanczos3_resample(a, 13, 9) + 3.0 * lanczos3_resample(b, 13, 9);
    CHECK((lhs - rhs).abs().maxCoeff() < 1e-9);
  }
}

TEST_SUITE("psnr") {
  TEST_CASE("all-zero against all-peak is 0 dB") {
    const SamplePlane a = SamplePlane::Zero(8, 8);
    const SamplePlane b = SamplePlane::Constant(8, 8, 255);
    CHECK(mse(a, b) == doctest::Approx(255.0 * 255.0));
    CHECK(psnr_from_mse(mse(a, b), 8) == doctest::Approx(0.0));
  }

  TEST_CASE("unit error on 10-bit is about 60.2 dB") {
    SamplePlane a = SamplePlane::Constant(16, 16, 500);
    SamplePlane b = a;
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = static_cast<std::uint16_t>(i % 2 ? 501 : 499);
    CHECK(mse(a, b) == doctest::Approx(1.0));
    CHECK(psnr_from_mse(1.0, 10) == doctest::Approx(20.0 * std::log10(1023.0)));
    CHECK(psnr_from_mse(1.0, 10) == doctest::Approx(60.2).epsilon(1e-3));
  }

  TEST_CASE("identical sequences report the cap per GoP") {
    std::vector<Frame> frames;
    for (int i = 0; i < 20; ++i) frames.push_back(Frame::from_luma(noise_plane(16, 16, 255, static_cast<std::uint64_t>(i)), 8));
    const InMemorySequence s(frames, 30.0);
    const auto r = psnr(s, s, 16);
    REQUIRE(r.gopDb.size() == 2);
    CHECK(r.gopDb[0] == kPsnrCapDb);
    CHECK(r.meanDb == kPsnrCapDb);
  }

  TEST_CASE("gop values come from the GoP-averaged MSE") {
    std::vector<Frame> ref, dist;
    for (int i = 0; i < 4; ++i) {
      ref.push_back(Frame::filled(8, 8, 8, 100));
      dist.push_back(Frame::filled(8, 8, 8, static_cast<std::uint16_t>(i < 2 ? 101 : 103)));
    }
    const auto r = psnr(InMemorySequence(ref, 30), InMemorySequence(dist, 30), 4);
    REQUIRE(r.gopDb.size() == 1);
    CHECK(r.gopDb[0] == doctest::Approx(10.0 * std::log10(255.0 * 255.0 / 5.0)));
  }
}

TEST_SUITE("glcm") {
  TEST_CASE("constant frame has a single co-occurrence cell") {
    const Frame f = Frame::filled(32, 32, 8, 90);
    const auto d = frame_glcm(f);
    CHECK(d.contrast == 0.0);
    CHECK(d.homogeneity == doctest::Approx(1.0));
    CHECK(d.energy == doctest::Approx(1.0));
    CHECK(d.entropy == doctest::Approx(0.0));
  }

  TEST_CASE("checkerboard contrast is the squared level gap") {
    const SamplePlane p = checkerboard(16, 16, 0, 255);
    // 8 levels: samples land in levels 0 and 7; vertical neighbours always differ.
    const auto d8 = glcm_descriptors(glcm(p, 8, {1, 0}, 8));
    CHECK(d8.contrast == doctest::Approx(49.0));
    CHECK(d8.energy == doctest::Approx(0.5));
    // Averaged over the four offsets at 32 levels: two offsets see 31^2, the diagonals 0.
    CHECK(frame_glcm(Frame::from_luma(p, 8)).contrast == doctest::Approx(961.0 / 2.0));
  }

  TEST_CASE("uniform noise approaches the entropy and energy bounds") {
    const double levels2 = kGlcmLevels * kGlcmLevels;
    double ent = 0.0, enr = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto d = frame_glcm(Frame::from_luma(noise_plane(256, 256, 255, seed), 8));
      ent += d.entropy / 10.0;
      enr += d.energy / 10.0;
    }
    CHECK(ent == doctest::Approx(std::log2(levels2)).epsilon(0.02));
    CHECK(enr == doctest::Approx(1.0 / levels2).epsilon(0.02));
  }
}

TEST_SUITE("temporal coherence") {
  TEST_CASE("static sequence is fully coherent") {
    const Frame f = Frame::from_luma(noise_plane(96, 64, 255, 5), 8);
    const auto t = temporal_coherence_features(repeat(f, 4));
    CHECK(t[0] == 1.0);                 // meanTC_mean
    CHECK(t[1] == 0.0);                 // meanTC_std
    CHECK(t[2] == 0.0);                 // skewness sentinel
    CHECK(t[3] == 3.0);                 // kurtosis sentinel
    for (int k = 5; k < 10; ++k) CHECK(t[static_cast<std::size_t>(k)] == 0.0);
  }

  TEST_CASE("independent noise frames are incoherent") {
    std::vector<Frame> frames;
    for (std::uint64_t s = 0; s < 4; ++s) frames.push_back(Frame::from_luma(noise_plane(256, 256, 255, 100 + s), 8));
    const auto t = temporal_coherence_features(InMemorySequence(frames, 30));
    CHECK(std::abs(t[0]) < 0.05);
  }

  TEST_CASE("a global luma shift keeps coherence") {
    const SamplePlane a = noise_plane(64, 64, 200, 9);
    const SamplePlane b = a + std::uint16_t{1};
    const auto map = coherence_map(Frame::from_luma(a, 8), Frame::from_luma(b, 8));
    for (double v : map) CHECK(v == doctest::Approx(1.0));
  }

  TEST_CASE("needs two frames") {
    CHECK_THROWS_AS(temporal_coherence_features(repeat(Frame::filled(32, 32, 8, 1), 1)), LadderError);
  }
}

TEST_SUITE("rsmse") {
  TEST_CASE("constant frame rescales losslessly") {
    CHECK(rsmse(repeat(Frame::filled(64, 48, 8, 77), 1), 32, 24) == 0.0);
  }

  TEST_CASE("low-frequency content survives while Nyquist content aliases") {
    SamplePlane sine(64, 64);
    for (int r = 0; r < 64; ++r)
      for (int c = 0; c < 64; ++c)
        // Period 32 with extrema on the borders, so edge clamping stays smooth.
        sine(r, c) = static_cast<std::uint16_t>(std::lround(128.0 + 60.0 * std::cos(std::numbers::pi * 4.0 * (c + 0.5) / 64.0)));
    const double smooth = rsmse(repeat(Frame::from_luma(sine, 8), 1), 32, 32);
    const double sharp = rsmse(repeat(Frame::from_luma(checkerboard(64, 64, 0, 255), 8), 1), 32, 32);
    CHECK(smooth < 0.5);
    CHECK(sharp > 100.0 * std::max(smooth, 1e-3));
  }
}

TEST_SUITE("descriptors") {
  TEST_CASE("static constant sequence has no activity") {
    const auto d = dataset_descriptors(repeat(Frame::filled(64, 64, 8, 60), 3));
    CHECK(d.si == 0.0);
    CHECK(d.ti == 0.0);
    CHECK(d.mv == 0.0);
  }

  TEST_CASE("a bar moving four pixels per frame has MV 4") {
    std::vector<Frame> frames;
    for (int i = 0; i < 4; ++i) {
      SamplePlane p = SamplePlane::Constant(64, 96, 16);
      p.col(20 + 4 * i).setConstant(235);
      frames.push_back(Frame::from_luma(p, 8));
    }
    const InMemorySequence s(frames, 30);
    int textured = 0;
    CHECK(motion_magnitude(s.frame(0), s.frame(1), &textured) == 4.0);
    CHECK(textured == 4);  // one column of 16x16 blocks holds the bar
    CHECK(dataset_descriptors(s, 2).mv == 4.0);
  }

  TEST_CASE("grey content has zero colourfulness") {
    const Frame f = Frame::from_luma(noise_plane(32, 32, 255, 4), 8);
    CHECK(colourfulness(f) == doctest::Approx(0.0).epsilon(1e-9));
    Frame red = Frame::filled(32, 32, 8, 81);
    red.u.setConstant(90);
    red.v.setConstant(240);
    CHECK(colourfulness(red) > 10.0);
  }
}

TEST_SUITE("frames") {
  TEST_CASE("raw and y4m files round-trip") {
    const auto dir = ladder::testing::scratch_dir("frames");
    std::vector<Frame> frames;
    for (int i = 0; i < 3; ++i) {
      Frame f = Frame::from_luma(noise_plane(20, 10, 1023, static_cast<std::uint64_t>(i)), 10);
      f.u.setConstant(static_cast<std::uint16_t>(300 + i));
      frames.push_back(f);
    }
    write_yuv(dir / "a.yuv", frames);
    const YuvFileSequence raw(dir / "a.yuv", {20, 10, 10, 25.0, 0});
    REQUIRE(raw.frameCount() == 3);
    CHECK((raw.frame(2).y == frames[2].y).all());
    CHECK((raw.frame(1).u == frames[1].u).all());
    CHECK_THROWS_AS(raw.frame(3), LadderError);

    std::vector<Frame> eight{Frame::filled(6, 4, 8, 10), Frame::filled(6, 4, 8, 20)};
    {
      std::ofstream y4m(dir / "b.y4m", std::ios::binary);
      y4m << "YUV4MPEG2 W6 H4 F25:1 Ip A1:1 C420jpeg\n";
      for (const auto& f : eight) {
        y4m << "FRAME\n";
        for (int k = 0; k < 24; ++k) y4m.put(static_cast<char>(f.y(0)));
        for (int k = 0; k < 12; ++k) y4m.put(static_cast<char>(128));
      }
    }
    const YuvFileSequence s(dir / "b.y4m", {});
    CHECK(s.width() == 6);
    CHECK(s.frameCount() == 2);
    CHECK(s.fps() == 25.0);
    CHECK((s.frame(1).y == 20).all());
  }

  TEST_CASE("a truncated file is rejected") {
    const auto dir = ladder::testing::scratch_dir("truncated");
    { std::ofstream(dir / "bad.yuv", std::ios::binary) << "abc"; }
    CHECK_THROWS_AS(YuvFileSequence(dir / "bad.yuv", {16, 16, 8, 30.0, 0}), LadderError);
  }
}

TEST_CASE("feature extraction is independent of the worker count") {
  std::vector<Frame> frames;
  for (std::uint64_t i = 0; i < 5; ++i) frames.push_back(Frame::from_luma(noise_plane(72, 48, 255, 40 + i), 8));
  const InMemorySequence s(frames, 30);
  const FeatureVector a = extract_features(s, 1);
  const FeatureVector b = extract_features(s, 3);
  for (int k = 1; k <= FeatureVector::kContent; ++k) {
    CHECK(a.f(k) == b.f(k));
    CHECK(std::isfinite(a.f(k)));
  }
  CHECK_FALSE(a.has(24));
  CHECK(FeatureVector::name(21) == "RsMSE_1080p");
}
