// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "ladderkit/eval.hpp"
#include "ladderkit/features.hpp"
#include "ladderkit/gp.hpp"
#include "ladderkit/learn.hpp"
#include "ladderkit/methods.hpp"
#include "ladderkit/rq.hpp"
#include "ladderkit/synthetic.hpp"
#include "support.hpp"

using namespace ladder;
namespace fs = std::filesystem;

namespace {

/// Collects failed checks for one criterion.
struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 8) failures.push_back(what);
    if (!ok && failures.size() == 8) failures.push_back("...");
  }
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

bool same_rungs(const BitrateLadder& a, const BitrateLadder& b) {
  if (a.rungs.size() != b.rungs.size()) return false;
  for (std::size_t i = 0; i < a.rungs.size(); ++i) {
    const auto &x = a.rungs[i], &y = b.rungs[i];
    if (x.rate != y.rate || x.quality != y.quality || x.qp != y.qp || x.resolution != y.resolution) return false;
  }
  return true;
}

bool strictly_monotone(const BitrateLadder& l) {
  for (std::size_t i = 1; i < l.rungs.size(); ++i)
    if (!(l.rungs[i].rate > l.rungs[i - 1].rate) || !(l.rungs[i].quality > l.rungs[i - 1].quality)) return false;
  return true;
}

// ---- shared oracle experiment ---------------------------------------------------

struct OracleRun {
  OracleSequence seq;
  MethodOutcome rl, il, fl;
};

struct OracleExperiment {
  TrainResult trained;
  std::vector<OracleRun> runs;
  double seconds = 0.0;
};

const OracleExperiment& oracle_experiment() {
  static const OracleExperiment ex = [] {
    const auto t0 = std::chrono::steady_clock::now();
    OracleExperiment e;
    OracleOptions train;
    train.count = 60;
    train.seed = 1;
    train.prefix = "train_";
    e.trained = testing::train_on_oracle(make_oracle_corpus(train), TrainOptions{});

    OracleOptions test;
    test.count = 30;
    test.seed = 7;
    test.prefix = "test_";
    const auto corpus = make_oracle_corpus(test);
    EncodeAdapter adapter(std::make_shared<SyntheticBackend>(oracle_models(corpus), SyntheticNoise::none()));
    MethodContext ctx;
    ctx.adapter = &adapter;
    for (const auto& s : corpus)
      e.runs.push_back({s, run_rl(ctx, s.id), run_il(ctx, s.id), run_fl(ctx, s.id, s.features, e.trained.predictor)});
    e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return e;
  }();
  return ex;
}

// ---- criteria ------------------------------------------------------------------------

std::string budgets(Check& c) {
  const auto& ex = oracle_experiment();
  OracleOptions o;
  o.count = 2;
  o.seed = 31;
  const auto corpus = make_oracle_corpus(o);
  auto fresh = [&] {
    return std::make_unique<EncodeAdapter>(std::make_shared<SyntheticBackend>(oracle_models(corpus), SyntheticNoise::none()));
  };
  MethodSelector toFl, toIl;
  toFl.constant = LadderMethod::FL;
  toIl.constant = LadderMethod::IL;
  const auto& s = corpus[0];
  const auto& p = ex.trained.predictor;

  int rl = 0, il = 0, fl = 0, hlFl = 0, hlIl = 0;
  {
    auto a = fresh();
    MethodContext ctx;
    ctx.adapter = a.get();
    rl = run_rl(ctx, s.id).budget.initialEncodes;
  }
  {
    auto a = fresh();
    MethodContext ctx;
    ctx.adapter = a.get();
    il = run_il(ctx, s.id).budget.initialEncodes;
  }
  {
    auto a = fresh();
    MethodContext ctx;
    ctx.adapter = a.get();
    fl = run_fl(ctx, s.id, s.features, p).budget.initialEncodes;
  }
  {
    auto a = fresh();
    MethodContext ctx;
    ctx.adapter = a.get();
    hlFl = run_hl(ctx, s.id, s.features, toFl, p).budget.initialEncodes;
    hlIl = run_hl(ctx, corpus[1].id, corpus[1].features, toIl, p).budget.initialEncodes;
  }
  c.expect(rl == 124, "RL total " + std::to_string(rl));
  c.expect(il == 28, "IL initial " + std::to_string(il));
  c.expect(fl == 7, "FL initial " + std::to_string(fl));
  c.expect(hlFl == 7 && hlIl == 28, "HL initial " + std::to_string(hlFl) + "/" + std::to_string(hlIl));
  return "RL " + std::to_string(rl) + ", IL " + std::to_string(il) + ", FL " + std::to_string(fl) + ", HL {" +
         std::to_string(hlFl) + ", " + std::to_string(hlIl) + "}";
}

std::string pareto_oracle(Check& c) {
  std::mt19937_64 rng(2024);
  const auto res = default_resolutions();
  std::uniform_int_distribution<int> size(1, 500), qp(15, 45), pick(0, 3), coarse(0, 1);
  std::uniform_real_distribution<double> rate(100.0, 30000.0), quality(20.0, 50.0);
  for (int t = 0; t < 1000; ++t) {
    const int n = size(rng);
    const bool grid = coarse(rng) == 1;  // coarse values force exact ties
    std::vector<RQPoint> pts;
    for (int i = 0; i < n; ++i) {
      const double r = grid ? 100.0 * (1 + static_cast<int>(rate(rng)) % 20) : rate(rng);
      const double q = grid ? std::floor(quality(rng)) : quality(rng);
      pts.push_back(RQPoint::make(r, q, qp(rng), res[static_cast<std::size_t>(pick(rng))]));
    }
    const auto got = build_pareto_front(pts).tuples;
    const auto want = testing::brute_force_front(pts);
    bool same = got.size() == want.size();
    for (std::size_t i = 0; same && i < got.size(); ++i)
      same = got[i].rate == want[i].rate && got[i].quality == want[i].quality && got[i].qp == want[i].qp &&
             got[i].resolution == want[i].resolution;
    c.expect(same, "instance " + std::to_string(t) + " (n=" + std::to_string(n) + ")");
  }
  return "1000 instances, n <= 500";
}

std::string oracle_end_to_end(Check& c) {
  const auto& ex = oracle_experiment();
  const auto names = crossover_names(default_resolutions());
  int crossings = 0, crossOk = 0;
  double worstAlpha = 0.0, worstIl = -1e9, worstFl = -1e9, hits = 0.0;
  for (const auto& r : ex.runs) {
    const auto& res = default_resolutions();
    c.expect(r.rl.crossovers.size() == res.size() - 1, r.seq.id + ": " + std::to_string(r.rl.crossovers.size()) + " crossings");
    for (const auto& pair : r.rl.crossovers) {
      std::size_t j = 0;
      while (j + 1 < res.size() && res[j] != pair.high.resolution) ++j;
      const double hi = r.seq.crossQp[2 * j], lo = r.seq.crossQp[2 * j + 1];
      crossings += 2;
      crossOk += (std::abs(pair.high.qp - hi) <= 1.0) + (std::abs(pair.low.qp - lo) <= 1.0);
      c.expect(std::abs(pair.high.qp - hi) <= 1.0, r.seq.id + " " + names[2 * j] + " " + std::to_string(pair.high.qp) + " vs " + fmt(hi));
      c.expect(std::abs(pair.low.qp - lo) <= 1.0, r.seq.id + " " + names[2 * j + 1] + " " + std::to_string(pair.low.qp) + " vs " + fmt(lo));
    }

    c.expect(r.fl.ran == LadderMethod::FL && r.fl.rateModel.has_value(), r.seq.id + ": FL fell back");
    if (r.fl.rateModel)
      for (const auto& s : res) {
        const double truth = r.seq.model.at(s).alpha;
        const double rel = std::abs(r.fl.rateModel->at(s).alpha - truth) / std::abs(truth);
        worstAlpha = std::max(worstAlpha, rel);
        c.expect(rel <= 0.02, r.seq.id + " alpha " + s.label + " off by " + fmt(100 * rel) + "%");
      }

    const auto bdIl = bd_metrics(r.rl.ladder, r.il.ladder);
    const auto bdFl = bd_metrics(r.rl.ladder, r.fl.ladder);
    c.expect(bdIl.comparable && bdFl.comparable, r.seq.id + ": BD not comparable");
    if (bdIl.comparable) {
      worstIl = std::max(worstIl, bdIl.bdRatePercent);
      c.expect(bdIl.bdRatePercent <= 0.5, r.seq.id + " IL BD-Rate " + fmt(bdIl.bdRatePercent));
    }
    if (bdFl.comparable) {
      worstFl = std::max(worstFl, bdFl.bdRatePercent);
      c.expect(bdFl.bdRatePercent <= 1.0, r.seq.id + " FL BD-Rate " + fmt(bdFl.bdRatePercent));
    }
    hits += pf_hits(r.fl.ladder, *r.rl.front);
  }
  hits /= static_cast<double>(ex.runs.size());
  c.expect(hits >= 80.0, "FL PF-hits " + fmt(hits));
  c.expect(ex.seconds < 120.0, "runtime " + fmt(ex.seconds) + " s");
  return std::to_string(crossOk) + "/" + std::to_string(crossings) + " crossings within 1 QP, worst alpha error " +
         fmt(100 * worstAlpha) + "%, worst IL BD-Rate " + fmt(worstIl) + "%, worst FL BD-Rate " + fmt(worstFl) +
         "%, FL PF-hits " + fmt(hits) + "%, " + fmt(ex.seconds) + " s";
}

std::string cross_relation(Check& c) {
  const auto& ex = oracle_experiment();
  const QpRange qps;
  auto rounded = [&](const std::vector<double>& v) {
    std::vector<double> out;
    for (double x : v) out.push_back(qps.clip(static_cast<int>(std::lround(x))));
    return out;
  };
  const auto x = rounded(ex.trained.outOfFold[0]), y = rounded(ex.trained.outOfFold[1]);
  const auto r = fit_cross_relation(x, y);
  c.expect(std::abs(r.lcc) >= 0.95, "LCC " + fmt(r.lcc));
  return "qp_high_2160p vs qp_low_1080p: LCC " + fmt(r.lcc) + ", slope " + fmt(r.slope);
}

std::string feature_units(Check& c) {
  const Frame flat = Frame::filled(64, 48, 8, 90);
  const auto g = frame_glcm(flat);
  c.expect(g.contrast == 0.0, "GLCM contrast " + fmt(g.contrast));
  c.expect(g.energy == 1.0, "GLCM energy " + fmt(g.energy));
  c.expect(g.homogeneity == 1.0, "GLCM homogeneity " + fmt(g.homogeneity));
  c.expect(g.entropy == 0.0, "GLCM entropy " + fmt(g.entropy));

  const InMemorySequence flatSeq(std::vector<Frame>(3, flat), 30.0);
  const double rs = rsmse(flatSeq, 32, 24);
  c.expect(rs == 0.0, "RsMSE " + fmt(rs));

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> d(0, 255);
  SamplePlane noise(48, 64);
  for (Eigen::Index i = 0; i < noise.size(); ++i) noise(i) = static_cast<std::uint16_t>(d(rng));
  const Frame textured = Frame::from_luma(noise, 8);
  const auto tc = temporal_coherence_features(InMemorySequence(std::vector<Frame>(3, textured), 30.0));
  c.expect(tc[0] == 1.0, "TC of static sequence " + fmt(tc[0]));

  const auto desc = dataset_descriptors(flatSeq);
  c.expect(desc.si == 0.0 && desc.ti == 0.0 && desc.mv == 0.0 && desc.cf == 0.0,
           "SI/TI/MV/CF " + fmt(desc.si) + "/" + fmt(desc.ti) + "/" + fmt(desc.mv) + "/" + fmt(desc.cf));

  // Checkerboard of 0 and 255: at 8 levels the vertical neighbours are always levels 0 and 7.
  SamplePlane board(16, 16);
  for (int r = 0; r < 16; ++r)
    for (int col = 0; col < 16; ++col) board(r, col) = (r + col) % 2 ? 255 : 0;
  const double contrast = glcm_descriptors(glcm(board, 8, {1, 0}, 8)).contrast;
  c.expect(std::abs(contrast - 49.0) < 1e-12, "checkerboard contrast " + fmt(contrast));
  return "constant GLCM, RsMSE, static TC, zero descriptors, checkerboard contrast " + fmt(contrast);
}

std::string bd_suite(Check& c) {
  auto ladder = [](double rateScale, double shift) {
    std::vector<std::pair<double, double>> rq;
    for (int i = 0; i < 8; ++i) rq.emplace_back(200.0 * std::exp2(i) * rateScale, 20.0 + 8.0 * std::log2(1.0 + i) + shift);
    return testing::make_ladder(rq);
  };
  const auto self = bd_metrics(ladder(1, 0), ladder(1, 0));
  const auto rate = bd_metrics(ladder(1, 0), ladder(1.10, 0));
  const auto psnr = bd_metrics(ladder(1, 0), ladder(1, 0.5));
  c.expect(self.comparable && std::abs(self.bdRatePercent) < 1e-9 && std::abs(self.bdPsnrDb) < 1e-9, "self comparison");
  c.expect(rate.comparable && std::abs(rate.bdRatePercent - 10.0) <= 0.05, "x1.10 BD-Rate " + fmt(rate.bdRatePercent));
  c.expect(psnr.comparable && std::abs(psnr.bdPsnrDb - 0.5) <= 1e-6, "+0.5 dB BD-PSNR " + fmt(psnr.bdPsnrDb));
  return "self (" + fmt(self.bdRatePercent) + ", " + fmt(self.bdPsnrDb) + "), x1.10 -> " + fmt(rate.bdRatePercent) +
         "%, +0.5 dB -> " + fmt(psnr.bdPsnrDb) + " dB";
}

std::string gp_sanity(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd x(20, 3);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = n(rng);
    y[i] = std::cos(x(i, 0)) + 0.5 * x(i, 1) - x(i, 2) * x(i, 2);
  }
  GpOptions exact;
  exact.fitNoise = false;
  exact.fixedNoiseVariance = 0.0;
  GaussianProcess interp;
  interp.fit(x, y, exact);
  const double interpErr = (interp.predict_rows(x) - y).cwiseAbs().maxCoeff();
  c.expect(interpErr < 1e-4, "interpolation error " + fmt(interpErr));

  Eigen::MatrixXd sx(20, 1);
  Eigen::VectorXd sy(20);
  for (int i = 0; i < 20; ++i) {
    sx(i, 0) = 2.0 * std::numbers::pi * i / 19.0;
    sy[i] = std::sin(sx(i, 0));
  }
  GaussianProcess sine;
  sine.fit(sx, sy, GpOptions{});
  double worst = 0.0;
  for (int k = 0; k <= 400; ++k) {
    const double t = 0.2 + (2.0 * std::numbers::pi - 0.4) * k / 400.0;
    worst = std::max(worst, std::abs(sine.predict(Eigen::RowVectorXd::Constant(1, t)) - std::sin(t)));
  }
  c.expect(worst < 0.05, "sin max error " + fmt(worst));

  const auto folds = cv_fold_assignment(97, 10, 5);
  std::vector<int> sizes(10, 0);
  bool inRange = true;
  for (int f : folds) {
    inRange = inRange && f >= 0 && f < 10;
    if (f >= 0 && f < 10) ++sizes[static_cast<std::size_t>(f)];
  }
  const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  c.expect(inRange && *hi - *lo <= 1, "fold sizes unbalanced");
  c.expect(folds == cv_fold_assignment(97, 10, 5), "folds not seed-reproducible");
  c.expect(folds != cv_fold_assignment(97, 10, 6), "folds ignore the seed");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(secs < 60.0, "runtime " + fmt(secs) + " s");
  return "interpolation error " + fmt(interpErr) + ", sin max error " + fmt(worst) + ", folds " + std::to_string(*lo) +
         ".." + std::to_string(*hi);
}

int run_cli(const fs::path& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.string() + "' && '" LADDERKIT_CLI "' " + args + " >> cli.log 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string determinism(Check& c) {
  const auto dir = testing::scratch_dir("acceptance-jobs");
  testing::write_clips(dir, 3);
  int compared = 0;
  for (int jobs : {1, 2, 4}) {
    const std::string out = "f" + std::to_string(jobs) + ".csv";
    c.expect(run_cli(dir, "--seed 9 --jobs " + std::to_string(jobs) + " features --manifest manifest.csv --out " + out) == 0,
             "features --jobs " + std::to_string(jobs) + " failed");
  }
  for (int jobs : {2, 4}) {
    c.expect(testing::slurp(dir / "f1.csv") == testing::slurp(dir / ("f" + std::to_string(jobs) + ".csv")),
             "features differ at --jobs " + std::to_string(jobs));
    ++compared;
  }

  c.expect(run_cli(dir, "synth --count 30 --out tr --prefix tr") == 0, "synth failed");
  c.expect(run_cli(dir, "--seed 5 synth --count 8 --out te --prefix te --noisy") == 0, "synth failed");
  c.expect(run_cli(dir, "train --features tr/features.csv --truth tr/truth.csv --out model.json --no-rfe") == 0, "train failed");
  for (const std::string m : {"rl", "il", "fl"}) {
    for (int jobs : {1, 4}) {
      const std::string args = "--seed 9 --config te/adapter.cfg --jobs " + std::to_string(jobs) + " ladder --method " + m +
                               " --bundle model.json --features te/features.csv --out " + m + std::to_string(jobs);
      c.expect(run_cli(dir, args) == 0, "ladder " + m + " --jobs " + std::to_string(jobs) + " failed");
    }
    for (const auto& e : fs::directory_iterator(dir / (m + "1"))) {
      const auto name = e.path().filename().string();
      if (name.rfind("run-", 0) == 0) continue;
      c.expect(testing::slurp(e.path()) == testing::slurp(dir / (m + "4") / name), m + "/" + name + " differs");
      ++compared;
    }
  }
  c.expect(compared > 40, "only " + std::to_string(compared) + " files compared");
  return std::to_string(compared) + " output files byte-identical across --jobs";
}

/// Random fronts: linear RQ lines per resolution, half of them with a quality
/// knee that flattens to 0.1 dB per doubling.
std::string ladder_properties(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& ex = oracle_experiment();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto res = default_resolutions();
  const LadderConfig cfg;
  const double step = std::log2(cfg.doublingFactor);

  int cases = 0, saturating = 0, shortened = 0;
  auto check_repair = [&](const BitrateLadder& l, const std::string& tag) {
    const BitrateLadder noisy = [&] {
      BitrateLadder n = l;
      for (auto& r : n.rungs) r.quality += 1.5 * (u(rng) - 0.5);
      return n;
    }();
    for (const auto* in : {&l, &noisy}) {
      const auto once = repair_ladder(*in, cfg.concavityToleranceDb);
      const auto twice = repair_ladder(once, cfg.concavityToleranceDb);
      c.expect(same_rungs(once, twice), tag + ": repair not idempotent");
      c.expect(strictly_monotone(once), tag + ": repaired ladder not monotone");
    }
  };

  for (const auto& r : ex.runs) {
    for (const auto* o : {&r.rl, &r.il, &r.fl}) {
      const std::string tag = r.seq.id + "/" + to_string(o->ran);
      c.expect(strictly_monotone(o->ladder), tag + ": not monotone");
      for (const auto& rung : o->ladder.rungs)
        c.expect(rung.rate >= cfg.rMin && rung.rate <= cfg.rMax, tag + ": rung outside rate window");
      check_repair(o->ladder, tag);
      ++cases;
    }
  }

  while (cases < 1000) {
    const bool knee = u(rng) < 0.5;
    const double kneeQ = 34.0 + 8.0 * u(rng);
    std::vector<RQPoint> pts;
    for (std::size_t s = 0; s < res.size(); ++s) {
      const double alpha = -4.0 - 2.0 * u(rng);
      const double top = 15.5 - 1.2 * s + 0.5 * u(rng);  // log-rate at QP 15
      const double q0 = 58.0 - 1.5 * s + u(rng), q1 = 0.5 + 0.2 * s + 0.1 * u(rng);
      for (int qp = 15; qp <= 45; ++qp) {
        const double lr = top + (qp - 15) / alpha;
        double q = q0 - q1 * qp + 0.05 * (u(rng) - 0.5);
        if (knee && q > kneeQ) q = kneeQ + 0.1 * (q - kneeQ);
        pts.push_back(RQPoint::make(std::exp2(lr), q, qp, res[s]));
      }
    }
    const auto front = build_pareto_front(pts);
    const auto l = build_reference_ladder(front, cfg);
    LadderConfig noStop = cfg;
    noStop.epsilon = 0.0;
    const auto full = build_reference_ladder(front, noStop);
    const std::string tag = "random front " + std::to_string(cases);

    c.expect(strictly_monotone(l), tag + ": not monotone");
    std::vector<RQPoint> trimmed;
    for (const auto& p : front.tuples)
      if (p.rate >= cfg.rMin && p.rate <= cfg.rMax) trimmed.push_back(p);
    double maxGap = 0.0;
    for (std::size_t i = 1; i < trimmed.size(); ++i) maxGap = std::max(maxGap, trimmed[i].logRate - trimmed[i - 1].logRate);

    // Each rung is the front point nearest one doubling above the previous rung.
    for (std::size_t i = 1; i < l.rungs.size(); ++i) {
      const double target = l.rungs[i - 1].logRate + step;
      const double gap = std::abs(l.rungs[i].logRate - target);
      // Past the top of the front the builder takes the last point while it is within half a step.
      const double tolerance = target <= trimmed.back().logRate ? 0.5 * maxGap : 0.5 * step;
      c.expect(gap <= tolerance + 1e-12, tag + ": rung " + std::to_string(i) + " off the doubling grid by " + fmt(gap));
      for (const auto& p : trimmed)
        if (p.rate > l.rungs[i - 1].rate && std::abs(p.logRate - target) < gap - 1e-12) {
          c.expect(false, tag + ": rung " + std::to_string(i) + " is not the nearest front point");
          break;
        }
    }
    const bool stopped = std::any_of(l.warnings.begin(), l.warnings.end(),
                                     [](const std::string& w) { return w.find("saturates") != std::string::npos; });
    if (!l.rungs.empty() && !stopped)
      c.expect(l.rungs.back().logRate + step - trimmed.back().logRate >= 0.5 * step - 1e-12, tag + ": ladder ends early");
    if (stopped) {
      c.expect(l.rungs.size() < full.rungs.size(), tag + ": saturation did not shorten the ladder");
      shortened += l.rungs.size() < full.rungs.size();
    } else {
      c.expect(same_rungs(l, full), tag + ": ladder changed without saturating");
    }
    saturating += knee;
    check_repair(l, tag);
    ++cases;
  }
  c.expect(shortened * 2 >= saturating, "only " + std::to_string(shortened) + " of " + std::to_string(saturating) +
                                             " knee fronts shortened the ladder");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(secs < 60.0, "runtime " + fmt(secs) + " s");
  return std::to_string(cases) + " ladders, " + std::to_string(shortened) + " shortened by saturation, " + fmt(secs) + " s";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::string(Check&)>>> criteria{
      {"encode budgets", budgets},
      {"pareto front vs brute force", pareto_oracle},
      {"synthetic oracle end to end", oracle_end_to_end},
      {"cross-over QP linear relation", cross_relation},
      {"feature unit values", feature_units},
      {"BD metric suite", bd_suite},
      {"GP regression and CV", gp_sanity},
      {"determinism across --jobs", determinism},
      {"ladder structure properties", ladder_properties},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    std::string detail;
    try {
      detail = criteria[i].second(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool pass = c.failures.empty();
    failed += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << detail << "\n";
    for (const auto& f : c.failures) std::cout << "    " << f << "\n";
    std::cout.flush();
  }
  return failed == 0 ? 0 : 1;
}
