#include "ladderkit/synthetic.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "ladderkit/io.hpp"

namespace ladder {

std::vector<std::string> crossover_names(const ResolutionSet& resolutions) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j + 1 < resolutions.size(); ++j) {
    names.push_back("qp_high_" + resolutions[j].label);
    names.push_back("qp_low_" + resolutions[j + 1].label);
  }
  return names;
}

double analytic_crossing(const ResolutionModel& hi, const ResolutionModel& lo) {
  // Quality as a line in x = log2 R: Q = q0 - q1 * (alpha * x + beta).
  const double sHi = -hi.q1 * hi.alpha, sLo = -lo.q1 * lo.alpha;
  const double aHi = hi.q0 - hi.q1 * hi.beta, aLo = lo.q0 - lo.q1 * lo.beta;
  if (sHi == sLo) return std::numeric_limits<double>::quiet_NaN();
  return (aLo - aHi) / (sHi - sLo);
}

namespace {

FeatureVector oracle_features(double u, double v, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, 1.0);
  auto noisy = [&](double x, double scale) { return x + 0.002 * scale * jitter(rng); };
  FeatureVector fv;
  // Informative features follow the latents; the rest are distractors.
  fv.set(1, 5.0 + 75.0 * unit(rng));
  fv.set(2, noisy(0.55 + 0.4 * u, 0.4));
  fv.set(3, 0.2 + 0.6 * unit(rng));
  fv.set(4, noisy(0.01 + 0.3 * std::exp(-3.0 * v), 0.3));
  fv.set(5, noisy(4.0 + 3.0 * v + 0.5 * u, 3.5));
  for (int i = 6; i <= 10; ++i) fv.set(i, 0.01 + 0.2 * unit(rng));
  fv.set(11, noisy(0.95 - 0.3 * u * v, 0.3));
  fv.set(12, noisy(0.05 + 0.2 * v, 0.2));
  fv.set(13, -1.5 + 1.4 * unit(rng));
  fv.set(14, noisy(3.0 + 4.0 * u * u, 4.0));
  fv.set(15, 1.0 + 4.0 * unit(rng));
  for (int i = 16; i <= 20; ++i) fv.set(i, 0.02 * (1.0 + 10.0 * unit(rng)));
  const double base = std::exp(1.0 + 2.0 * u + v);
  const double gain[3] = {1.0, 1.8, 2.6};
  for (int k = 0; k < 3; ++k) fv.set(21 + k, noisy(base * gain[k], base));
  return fv;
}

}  // namespace

std::vector<OracleSequence> make_oracle_corpus(const OracleOptions& options, const ResolutionSet& resolutions) {
  if (resolutions.size() != 4) throw LadderError("the oracle corpus needs exactly four resolutions");
  if (options.count <= 0) throw LadderError("oracle corpus size must be positive");
  std::vector<OracleSequence> out;
  for (int n = 0; n < options.count; ++n) {
    const std::string tag = std::to_string(options.seed) + "/" + std::to_string(n);
    std::mt19937_64 rng(fnv1a(tag.data(), tag.size()));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng), v = unit(rng);

    // Log-rate of QP 30 per resolution, QP-vs-log-rate slopes, and quality
    // slopes in dB per octave (steeper at larger resolutions).
    const double l0 = 12.8 + 1.2 * u + 0.4 * v;
    const double alpha[4] = {-(4.6 + 0.8 * u), -(4.9 + 0.6 * u), -(5.2 + 0.5 * u), -(5.2 + 0.5 * u)};
    const double s0 = 3.0 + 0.5 * u + 0.3 * v;
    const double slope[4] = {s0, s0 - 0.25 - 0.1 * v, s0 - 0.5 - 0.15 * v - 0.05 * u, s0 - 0.75 - 0.2 * v - 0.1 * u};
    std::vector<double> cross(3);
    cross[0] = l0 - 0.3 - 1.8 * u + 0.3 * v;
    cross[1] = cross[0] - 1.35 - 0.3 * v + 0.2 * u;
    cross[2] = cross[1] - 1.3 - 0.2 * v + 0.2 * u;

    double intercept[4];
    intercept[0] = 36.0 + 2.0 * v - 2.0 * u - s0 * l0;
    for (int k = 1; k < 4; ++k) intercept[k] = intercept[k - 1] + (slope[k - 1] - slope[k]) * cross[k - 1];

    OracleSequence seq;
    seq.id = options.prefix + "_" + std::to_string(n);
    seq.u = u;
    seq.v = v;
    seq.crossLogRate = cross;
    for (int k = 0; k < 4; ++k) {
      ResolutionModel m;
      m.alpha = alpha[k];
      m.beta = 30.0 - alpha[k] * (l0 - 1.25 * k);
      m.q0 = intercept[k] - slope[k] * m.beta / m.alpha;
      m.q1 = -slope[k] / m.alpha;
      seq.model.byLabel[resolutions[static_cast<std::size_t>(k)].label] = m;
    }
    for (int j = 0; j < 3; ++j) {
      seq.crossQp.push_back(alpha[j] * cross[static_cast<std::size_t>(j)] + (30.0 - alpha[j] * (l0 - 1.25 * j)));
      seq.crossQp.push_back(alpha[j + 1] * cross[static_cast<std::size_t>(j)] + (30.0 - alpha[j + 1] * (l0 - 1.25 * (j + 1))));
    }
    seq.features = oracle_features(u, v, rng);
    out.push_back(std::move(seq));
  }
  return out;
}

std::map<std::string, SyntheticModel> oracle_models(const std::vector<OracleSequence>& corpus) {
  std::map<std::string, SyntheticModel> m;
  for (const auto& s : corpus) m[s.id] = s.model;
  return m;
}

void write_synthetic_models(const std::filesystem::path& path, const std::map<std::string, SyntheticModel>& models,
                            const ResolutionSet& resolutions) {
  CsvTable t;
  t.header = {"sequence_id", "resolution", "width", "height", "alpha", "beta", "q0", "q1"};
  for (const auto& [id, model] : models)
    for (const auto& res : resolutions) {
      const auto& r = model.at(res);
      t.rows.push_back({id, res.label, std::to_string(res.width), std::to_string(res.height), format_double(r.alpha),
                        format_double(r.beta), format_double(r.q0), format_double(r.q1)});
    }
  write_csv(path, t);
}

std::map<std::string, SyntheticModel> read_synthetic_models(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const auto cId = t.column("sequence_id"), cRes = t.column("resolution"), cA = t.column("alpha"),
             cB = t.column("beta"), cQ0 = t.column("q0"), cQ1 = t.column("q1");
  std::map<std::string, SyntheticModel> out;
  for (const auto& row : t.rows) {
    ResolutionModel m;
    m.alpha = parse_double(row[cA]);
    m.beta = parse_double(row[cB]);
    m.q0 = parse_double(row[cQ0]);
    m.q1 = parse_double(row[cQ1]);
    out[row[cId]].byLabel[row[cRes]] = m;
  }
  return out;
}

}  // namespace ladder
