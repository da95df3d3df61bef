#include "ladderkit/methods.hpp"

#include <cmath>
#include <map>
#include <set>

#include "ladderkit/pchip.hpp"
#include "ladderkit/rq.hpp"

namespace ladder {

std::vector<int> il_sample_qps(const QpRange& qps, int samples) {
  if (samples < 4 || samples > qps.size())
    throw LadderError("IL needs between 4 and " + std::to_string(qps.size()) + " QP samples, got " +
                      std::to_string(samples));
  std::vector<int> out;
  const double span = qps.max - qps.min;
  for (int i = 0; i < samples; ++i)
    out.push_back(qps.min + static_cast<int>(std::lround(i * span / (samples - 1))));
  return out;
}

BitrateLadder apply_ladder_limits(BitrateLadder ladder, const LadderConfig& cfg) {
  std::vector<Rung> kept;
  int outside = 0;
  for (const auto& r : ladder.rungs) {
    if (r.rate < cfg.rMin || r.rate > cfg.rMax) {
      ++outside;
      continue;
    }
    if (cfg.qMax && r.quality > *cfg.qMax) break;
    if (!kept.empty()) {
      const double slope = (r.quality - kept.back().quality) / (r.logRate - kept.back().logRate);
      if (slope <= cfg.epsilon) {
        ladder.warnings.push_back("ladder saturates; stopped early");
        break;
      }
    }
    kept.push_back(r);
  }
  if (outside) ladder.warnings.push_back(std::to_string(outside) + " rung(s) outside [rMin, rMax] dropped");
  ladder.rungs = std::move(kept);
  return ladder;
}

namespace {

EncodeAdapter& adapter_of(const MethodContext& ctx) {
  if (!ctx.adapter) throw LadderError("method context has no encode adapter");
  return *ctx.adapter;
}

int distinct(const EncodeAdapter& a, const std::vector<EncodeRequest>& reqs, std::set<EncodeKey>* seen) {
  int n = 0;
  for (const auto& r : reqs)
    if (seen->insert(a.key(r)).second) ++n;
  return n;
}

/// Encodes each rung's (resolution, QP) and replaces the planned point with
/// the measured one.
std::vector<Rung> realize(EncodeAdapter& adapter, const MethodContext& ctx, const std::string& id,
                          const std::vector<Rung>& planned, std::set<EncodeKey>* seen, EncodeBudget* budget) {
  std::vector<EncodeRequest> reqs;
  for (const auto& r : planned) reqs.push_back({id, r.resolution, r.qp, ctx.profile});
  budget->rungEncodes += distinct(adapter, reqs, seen);
  const auto results = adapter.encode_batch(reqs);
  std::vector<Rung> out;
  for (std::size_t i = 0; i < planned.size(); ++i) out.push_back(to_rung(results[i].point(), planned[i].targetRate));
  return out;
}

}  // namespace

MethodOutcome run_rl(const MethodContext& ctx, const std::string& id) {
  EncodeAdapter& adapter = adapter_of(ctx);
  ctx.ladder.validate();
  const long before = adapter.invocations();
  const auto sweep = adapter.sweep(id, ctx.resolutions, ctx.qps.values(), ctx.profile);

  MethodOutcome out;
  out.ran = LadderMethod::RL;
  out.budget.initialEncodes = sweep.requested;
  const auto points = flatten(sweep.curves);
  out.front = build_pareto_front(points);
  out.crossovers = find_intersections(sweep.curves);
  out.ladder = build_reference_ladder(*out.front, ctx.ladder);
  out.ladder.method = LadderMethod::RL;
  out.budget.backendCalls = adapter.invocations() - before;
  out.ladder.encodeCount = out.budget.total();
  return out;
}

MethodOutcome run_il(const MethodContext& ctx, const std::string& id, const ILConfig& il) {
  EncodeAdapter& adapter = adapter_of(ctx);
  ctx.ladder.validate();
  const std::vector<int> sampled = il_sample_qps(ctx.qps, il.samples);
  const long before = adapter.invocations();

  std::vector<EncodeRequest> initial;
  for (const auto& res : ctx.resolutions)
    for (int qp : sampled) initial.push_back({id, res, qp, ctx.profile});
  std::set<EncodeKey> seen;
  MethodOutcome out;
  out.ran = LadderMethod::IL;
  out.budget.initialEncodes = distinct(adapter, initial, &seen);
  const auto results = adapter.encode_batch(initial);

  std::vector<RQPoint> synthesized;
  std::size_t k = 0;
  for (const auto& res : ctx.resolutions) {
    std::vector<double> qs, logRates, qualities;
    for (int qp : sampled) {
      const auto& r = results[k++];
      qs.push_back(qp);
      logRates.push_back(std::log2(r.bitrateKbps));
      qualities.push_back(r.psnrDb);
    }
    const auto rateCurve = Pchip<double>::from(qs, logRates);
    const auto qualityCurve = Pchip<double>::from(qs, qualities);
    for (int qp = ctx.qps.min; qp <= ctx.qps.max; ++qp) {
      RQPoint p = RQPoint::make(std::exp2(rateCurve(qp)), qualityCurve(qp), qp, res);
      synthesized.push_back(p);
    }
  }
  out.front = build_pareto_front(synthesized);
  const BitrateLadder planned = build_reference_ladder(*out.front, ctx.ladder);

  BitrateLadder ladder;
  ladder.method = LadderMethod::IL;
  ladder.warnings = planned.warnings;
  ladder.rungs = realize(adapter, ctx, id, planned.rungs, &seen, &out.budget);
  ladder = apply_ladder_limits(enforce_monotone(std::move(ladder)), ctx.ladder);
  out.ladder = std::move(ladder);
  out.budget.backendCalls = adapter.invocations() - before;
  out.ladder.encodeCount = out.budget.total();
  return out;
}

MethodOutcome run_fl(const MethodContext& ctx, const std::string& id, const FeatureVector& features,
                     const CrossoverPredictor& predictor, const ILConfig& fallback) {
  EncodeAdapter& adapter = adapter_of(ctx);
  ctx.ladder.validate();
  const auto& res = ctx.resolutions;
  const std::size_t nres = res.size();
  if (nres < 2) throw LadderError("FL needs at least two resolutions");
  const std::vector<int> qp = predictor.predict(features);
  if (qp.size() != 2 * (nres - 1))
    throw LadderError("model bundle predicts " + std::to_string(qp.size()) + " cross-over QPs; " +
                      std::to_string(2 * (nres - 1)) + " needed");
  const long before = adapter.invocations();

  // Per resolution: the cross-over QPs it takes part in. The largest gets
  // one extra encode away from its single cross-over QP.
  std::vector<std::vector<int>> perRes(nres);
  for (std::size_t j = 0; j + 1 < nres; ++j) {
    perRes[j].push_back(qp[2 * j]);
    perRes[j + 1].push_back(qp[2 * j + 1]);
  }
  const int top = qp[0];
  perRes[0].push_back(ctx.qps.clip(top <= ctx.qps.mid() ? top + 8 : top - 8));

  std::vector<EncodeRequest> initial;
  for (std::size_t s = 0; s < nres; ++s)
    for (int q : perRes[s]) initial.push_back({id, res[s], q, ctx.profile});
  std::set<EncodeKey> seen;
  MethodOutcome out;
  out.ran = LadderMethod::FL;
  out.predictedQps = qp;
  out.budget.initialEncodes = distinct(adapter, initial, &seen);
  const auto results = adapter.encode_batch(initial);

  std::vector<std::vector<std::pair<double, double>>> pts(nres);
  std::vector<std::map<int, double>> rateAt(nres);
  std::size_t k = 0;
  for (std::size_t s = 0; s < nres; ++s)
    for (int q : perRes[s]) {
      const auto& r = results[k++];
      pts[s].emplace_back(q, std::log2(r.bitrateKbps));
      rateAt[s][q] = r.bitrateKbps;
    }

  std::string failure;
  try {
    out.rateModel = fit_qp_lograte(res, pts, true);
    for (std::size_t s = 0; s < nres; ++s)
      if (!(out.rateModel->lines[s].alpha < 0.0)) failure = "non-negative alpha for " + res[s].label;
  } catch (const LadderError& e) {
    failure = e.what();
  }
  if (!failure.empty()) {
    MethodOutcome il = run_il(ctx, id, fallback);
    il.ladder.warnings.insert(il.ladder.warnings.begin(), "FL line fit failed (" + failure + "); fell back to IL");
    il.predictedQps = qp;
    il.ladder.method = LadderMethod::FL;
    // FL encodes that IL sampled anyway are not counted twice.
    std::set<EncodeKey> ilKeys;
    for (const auto& r : res)
      for (int q : il_sample_qps(ctx.qps, fallback.samples)) ilKeys.insert(adapter.key({id, r, q, ctx.profile}));
    for (const auto& key : seen)
      if (!ilKeys.count(key)) ++il.budget.initialEncodes;
    il.budget.backendCalls = adapter.invocations() - before;
    il.ladder.encodeCount = il.budget.total();
    return il;
  }
  const QPLogRateModel& model = *out.rateModel;

  for (std::size_t j = 0; j + 1 < nres; ++j)
    out.switchRates.push_back(0.5 * (rateAt[j][qp[2 * j]] + rateAt[j + 1][qp[2 * j + 1]]));

  const double minRate = std::exp2(model.lines[nres - 1].log_rate(ctx.qps.max));
  const double maxRate = std::exp2(model.lines[0].log_rate(ctx.qps.min));
  const double lo = std::max(ctx.ladder.rMin, minRate);
  const double hi = std::min(ctx.ladder.rMax, maxRate);
  const double step = std::log2(ctx.ladder.doublingFactor);

  std::vector<Rung> planned;
  if (lo <= hi) {
    for (double x = std::log2(lo); x - std::log2(hi) < 0.5 * step; x += step) {
      const double target = std::exp2(std::min(x, std::log2(hi)));
      std::size_t s = nres - 1;
      for (std::size_t j = 0; j + 1 < nres; ++j)
        if (target >= out.switchRates[j]) {
          s = j;
          break;
        }
      const auto& line = model.lines[s];
      int q = ctx.qps.clip(static_cast<int>(std::lround(line.qp(std::log2(target)))));
      // Keep the modelled rate inside [rMin, rMax] after rounding.
      if (std::exp2(line.log_rate(q)) < ctx.ladder.rMin && q > ctx.qps.min) --q;
      if (std::exp2(line.log_rate(q)) > ctx.ladder.rMax && q < ctx.qps.max) ++q;
      Rung r;
      r.targetRate = target;
      r.qp = q;
      r.resolution = res[s];
      planned.push_back(r);
    }
  } else {
    out.ladder.warnings.push_back("modelled rate range misses [rMin, rMax]; empty ladder");
  }

  BitrateLadder ladder;
  ladder.method = LadderMethod::FL;
  ladder.warnings = out.ladder.warnings;
  ladder.rungs = realize(adapter, ctx, id, planned, &seen, &out.budget);
  ladder = apply_ladder_limits(repair_ladder(std::move(ladder), ctx.ladder.concavityToleranceDb), ctx.ladder);
  out.ladder = std::move(ladder);
  out.budget.backendCalls = adapter.invocations() - before;
  out.ladder.encodeCount = out.budget.total();
  return out;
}

MethodOutcome run_hl(const MethodContext& ctx, const std::string& id, const FeatureVector& features,
                     const MethodSelector& selector, const CrossoverPredictor& predictor, const ILConfig& il) {
  const LadderMethod choice = selector.choose(features);
  MethodOutcome out = choice == LadderMethod::IL ? run_il(ctx, id, il) : run_fl(ctx, id, features, predictor, il);
  out.ladder.method = LadderMethod::HL;
  return out;
}

}  // namespace ladder
