#include "ladderkit/rq.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <optional>
#include <set>

#include "ladderkit/pchip.hpp"

namespace ladder {

ResolutionSet make_resolution_set(std::vector<Resolution> list) {
  std::set<std::string> labels;
  for (const auto& r : list) {
    if (r.height <= 0 || r.width < r.height)
      throw LadderError("resolution " + r.label + ": need width >= height > 0");
    if (!labels.insert(r.label).second) throw LadderError("duplicate resolution label " + r.label);
  }
  std::stable_sort(list.begin(), list.end(),
                   [](const Resolution& a, const Resolution& b) { return a.pixels() > b.pixels(); });
  return list;
}

ResolutionSet default_resolutions() {
  return make_resolution_set({{3840, 2160, "2160p"}, {1920, 1080, "1080p"}, {1280, 720, "720p"}, {960, 540, "540p"}});
}

const Resolution& find_resolution(const ResolutionSet& set, const std::string& label) {
  for (const auto& r : set)
    if (r.label == label) return r;
  throw LadderError("unknown resolution " + label);
}

std::vector<int> QpRange::values() const {
  std::vector<int> out;
  for (int q = min; q <= max; ++q) out.push_back(q);
  return out;
}

RQPoint RQPoint::make(double rateKbps, double qualityDb, int qp, Resolution res) {
  if (!(rateKbps > 0.0)) throw LadderError("rate must be positive");
  return {rateKbps, std::log2(rateKbps), qualityDb, qp, std::move(res)};
}

bool ParetoFront::contains(const Resolution& res, int qp) const {
  return std::any_of(tuples.begin(), tuples.end(),
                     [&](const RQPoint& p) { return p.resolution == res && p.qp == qp; });
}

void LadderConfig::validate() const {
  if (!(rMin > 0.0 && rMin < rMax)) throw LadderError("ladder config: need 0 < rMin < rMax");
  if (epsilon < 0.0) throw LadderError("ladder config: epsilon must be >= 0");
  if (!(doublingFactor > 1.0)) throw LadderError("ladder config: doubling factor must exceed 1");
}

std::string to_string(LadderMethod m) {
  switch (m) {
    case LadderMethod::RL: return "RL";
    case LadderMethod::IL: return "IL";
    case LadderMethod::FL: return "FL";
    case LadderMethod::HL: return "HL";
  }
  return "?";
}

LadderMethod parse_method(const std::string& s) {
  std::string u;
  for (char c : s) u += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (u == "RL") return LadderMethod::RL;
  if (u == "IL") return LadderMethod::IL;
  if (u == "FL") return LadderMethod::FL;
  if (u == "HL") return LadderMethod::HL;
  throw LadderError("unknown ladder method " + s);
}

ParetoFront build_pareto_front(std::span<const RQPoint> points) {
  if (points.empty()) throw LadderError("no points");
  std::vector<RQPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), [](const RQPoint& a, const RQPoint& b) {
    if (a.rate != b.rate) return a.rate < b.rate;
    if (a.quality != b.quality) return a.quality > b.quality;
    if (a.resolution.pixels() != b.resolution.pixels()) return a.resolution.pixels() < b.resolution.pixels();
    return a.qp > b.qp;
  });

  ParetoFront front;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : sorted) {
    if (p.quality > best) {
      front.tuples.push_back(p);
      best = p.quality;
    }
  }

  std::vector<Resolution> seen;
  for (const auto& p : points)
    if (std::find(seen.begin(), seen.end(), p.resolution) == seen.end()) seen.push_back(p.resolution);
  std::sort(seen.begin(), seen.end(), [](const Resolution& a, const Resolution& b) { return a.pixels() > b.pixels(); });
  front.sourceCurves = std::move(seen);
  return front;
}

std::vector<RQPoint> flatten(std::span<const RQCurve> curves) {
  std::vector<RQPoint> all;
  for (const auto& c : curves) all.insert(all.end(), c.points.begin(), c.points.end());
  return all;
}

std::vector<RQPoint> monotone_curve_points(const RQCurve& curve, int* dropped) {
  if (curve.points.empty()) return {};
  const ParetoFront f = build_pareto_front(curve.points);
  if (dropped) *dropped = static_cast<int>(curve.points.size() - f.tuples.size());
  return f.tuples;
}

namespace {

Pchip<double> quality_over_lograte(const std::vector<RQPoint>& pts) {
  std::vector<double> x, y;
  for (const auto& p : pts) {
    x.push_back(p.logRate);
    y.push_back(p.quality);
  }
  return Pchip<double>::from(x, y);
}

const RQPoint& nearest_in_lograte(const std::vector<RQPoint>& pts, double logRate) {
  const RQPoint* best = &pts.front();
  for (const auto& p : pts)
    if (std::abs(p.logRate - logRate) < std::abs(best->logRate - logRate)) best = &p;
  return *best;
}

}  // namespace

std::vector<CrossOverPair> find_intersections(std::span<const RQCurve> curves) {
  std::vector<const RQCurve*> ordered;
  for (const auto& c : curves) ordered.push_back(&c);
  std::sort(ordered.begin(), ordered.end(),
            [](const RQCurve* a, const RQCurve* b) { return a->resolution.pixels() > b->resolution.pixels(); });

  std::vector<CrossOverPair> out;
  for (std::size_t j = 0; j + 1 < ordered.size(); ++j) {
    const auto hiPts = monotone_curve_points(*ordered[j]);
    const auto loPts = monotone_curve_points(*ordered[j + 1]);
    if (hiPts.size() < 2 || loPts.size() < 2) continue;
    const auto hi = quality_over_lograte(hiPts);
    const auto lo = quality_over_lograte(loPts);

    const double a = std::max(hi.xmin(), lo.xmin());
    const double b = std::min(hi.xmax(), lo.xmax());
    if (!(a < b)) continue;

    std::vector<double> knots{a, b};
    for (const auto* pts : {&hiPts, &loPts})
      for (const auto& p : *pts)
        if (p.logRate > a && p.logRate < b) knots.push_back(p.logRate);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    constexpr int kSubdivisions = 16;
    std::vector<double> grid;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k)
      for (int s = 0; s < kSubdivisions; ++s)
        grid.push_back(knots[k] + (knots[k + 1] - knots[k]) * s / kSubdivisions);
    grid.push_back(b);

    auto diff = [&](double x) { return hi(x) - lo(x); };
    std::optional<double> crossing;
    for (std::size_t k = grid.size() - 1; k > 0 && !crossing; --k) {
      double x1 = grid[k], x0 = grid[k - 1];
      double d1 = diff(x1), d0 = diff(x0);
      if (d1 == 0.0) {
        crossing = x1;
      } else if (d0 == 0.0) {
        crossing = x0;
      } else if ((d0 < 0.0) != (d1 < 0.0)) {
        for (int it = 0; it < 200 && x1 - x0 > 1e-13; ++it) {
          const double m = 0.5 * (x0 + x1);
          const double dm = diff(m);
          if (dm == 0.0) {
            x0 = x1 = m;
            break;
          }
          if ((dm < 0.0) == (d0 < 0.0)) {
            x0 = m;
            d0 = dm;
          } else {
            x1 = m;
          }
        }
        crossing = 0.5 * (x0 + x1);
      }
    }
    if (!crossing) continue;

    const RQPoint& ph = nearest_in_lograte(hiPts, *crossing);
    const RQPoint& pl = nearest_in_lograte(loPts, *crossing);
    CrossOverPair pair;
    pair.high = {ph.resolution, CrossLevel::High, ph.qp, ph.rate};
    pair.low = {pl.resolution, CrossLevel::Low, pl.qp, pl.rate};
    pair.logRate = *crossing;
    pair.quality = hi(*crossing);
    out.push_back(pair);
  }
  return out;
}

Rung to_rung(const RQPoint& p, double targetRate) {
  return {targetRate, p.rate, p.logRate, p.quality, p.qp, p.resolution};
}

BitrateLadder build_reference_ladder(const ParetoFront& front, const LadderConfig& cfg) {
  cfg.validate();
  BitrateLadder ladder;
  ladder.method = LadderMethod::RL;

  std::vector<RQPoint> trimmed;
  for (const auto& p : front.tuples)
    if (p.rate >= cfg.rMin && p.rate <= cfg.rMax) trimmed.push_back(p);
  if (trimmed.empty()) {
    ladder.warnings.push_back("front has no points inside [rMin, rMax]; empty ladder");
    return ladder;
  }

  const double step = std::log2(cfg.doublingFactor);
  auto overQualityCap = [&](const RQPoint& p) { return cfg.qMax && p.quality > *cfg.qMax; };

  if (overQualityCap(trimmed.front())) {
    ladder.warnings.push_back("lowest admissible point already exceeds qMax");
    return ladder;
  }
  ladder.rungs.push_back(to_rung(trimmed.front(), trimmed.front().rate));

  const double lastLog = trimmed.back().logRate;
  std::size_t prev = 0;
  while (true) {
    const double target = trimmed[prev].logRate + step;
    if (target - lastLog >= 0.5 * step) break;
    std::size_t best = trimmed.size();
    for (std::size_t i = prev + 1; i < trimmed.size(); ++i) {
      if (best == trimmed.size() ||
          std::abs(trimmed[i].logRate - target) < std::abs(trimmed[best].logRate - target))
        best = i;
    }
    if (best == trimmed.size()) break;
    const RQPoint& cand = trimmed[best];
    if (overQualityCap(cand)) break;
    const double slope = (cand.quality - trimmed[prev].quality) / (cand.logRate - trimmed[prev].logRate);
    if (slope <= cfg.epsilon) {
      ladder.warnings.push_back("front saturates; ladder stops early");
      break;
    }
    ladder.rungs.push_back(to_rung(cand, cand.rate));
    prev = best;
  }
  return ladder;
}

BitrateLadder enforce_monotone(BitrateLadder ladder) {
  auto& r = ladder.rungs;
  std::stable_sort(r.begin(), r.end(), [](const Rung& a, const Rung& b) {
    if (a.rate != b.rate) return a.rate < b.rate;
    return a.quality > b.quality;
  });
  std::vector<Rung> kept;
  for (const auto& rung : r) {
    if (!kept.empty() && (rung.rate <= kept.back().rate || rung.quality <= kept.back().quality)) continue;
    kept.push_back(rung);
  }
  r = std::move(kept);
  return ladder;
}

BitrateLadder repair_ladder(BitrateLadder ladder, double toleranceDb) {
  ladder = enforce_monotone(std::move(ladder));
  auto& r = ladder.rungs;
  while (r.size() >= 3) {
    double worstDip = toleranceDb;
    std::size_t worst = 0;
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
      const double t = (r[i].logRate - r[i - 1].logRate) / (r[i + 1].logRate - r[i - 1].logRate);
      const double chord = r[i - 1].quality + t * (r[i + 1].quality - r[i - 1].quality);
      const double dip = chord - r[i].quality;
      if (dip > worstDip) {
        worstDip = dip;
        worst = i;
      }
    }
    if (worst == 0) break;
    r.erase(r.begin() + static_cast<std::ptrdiff_t>(worst));
  }
  return ladder;
}

}  // namespace ladder
