// ladderkit: feature extraction, training, ladder construction and
// evaluation from the command line.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iostream>
#include <map>
#include <memory>
#include <set>

#include "ladderkit/bundle.hpp"
#include "ladderkit/encode.hpp"
#include "ladderkit/eval.hpp"
#include "ladderkit/features.hpp"
#include "ladderkit/io.hpp"
#include "ladderkit/learn.hpp"
#include "ladderkit/methods.hpp"
#include "ladderkit/report.hpp"
#include "ladderkit/selector.hpp"
#include "ladderkit/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ladder;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

class ConfigError : public LadderError {
 public:
  using LadderError::LadderError;
};

struct Globals {
  std::uint64_t seed = 1;
  unsigned jobs = 0;  // 0: take `workers` from the config, else 1
  std::string config;
  std::vector<std::string> sets;
  std::string runManifest;
};

KeyValueConfig load_config(const Globals& g) {
  KeyValueConfig cfg;
  try {
    if (!g.config.empty()) cfg = KeyValueConfig::load(g.config);
  } catch (const LadderError& e) {
    throw ConfigError(e.what());
  }
  for (const auto& kv : g.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

double number(const KeyValueConfig& cfg, const std::string& key, double fallback) {
  try {
    return cfg.number_or(key, fallback);
  } catch (const LadderError&) {
    throw ConfigError("config key " + key + " is not a number: " + cfg.get_or(key, ""));
  }
}

int integer(const KeyValueConfig& cfg, const std::string& key, int fallback) {
  const double v = number(cfg, key, fallback);
  if (v != std::floor(v)) throw ConfigError("config key " + key + " must be an integer");
  return static_cast<int>(v);
}

unsigned jobs_of(const Globals& g, const KeyValueConfig& cfg) {
  if (g.jobs > 0) return g.jobs;
  const int w = integer(cfg, "workers", 1);
  if (w < 1) throw ConfigError("workers must be at least 1");
  return static_cast<unsigned>(w);
}

LadderConfig ladder_config(const KeyValueConfig& cfg) {
  LadderConfig lc;
  lc.rMin = number(cfg, "r_min", lc.rMin);
  lc.rMax = number(cfg, "r_max", lc.rMax);
  const std::string qMax = cfg.get_or("q_max", "off");
  if (qMax != "off" && !qMax.empty()) lc.qMax = number(cfg, "q_max", 0.0);
  lc.epsilon = number(cfg, "epsilon", lc.epsilon);
  lc.doublingFactor = number(cfg, "doubling_factor", lc.doublingFactor);
  lc.concavityToleranceDb = number(cfg, "concavity_tolerance_db", lc.concavityToleranceDb);
  try {
    lc.validate();
  } catch (const LadderError& e) {
    throw ConfigError(e.what());
  }
  return lc;
}

QpRange qp_range(const KeyValueConfig& cfg) {
  QpRange q{integer(cfg, "qp_min", 15), integer(cfg, "qp_max", 45)};
  if (q.min > q.max) throw ConfigError("qp_min exceeds qp_max");
  return q;
}

// ---- run manifest --------------------------------------------------------------

struct RunManifest {
  std::string command;
  json arguments = json::object();
  json inputs = json::array();
  json outputs = json::array();

  void input(const fs::path& p) {
    std::string digest = "unreadable";
    try {
      char buf[17];
      std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(file_digest(p)));
      digest = buf;
    } catch (const LadderError&) {
    }
    inputs.push_back({{"path", p.string()}, {"fnv1a64", digest}});
  }
  void output(const fs::path& p) { outputs.push_back(p.string()); }

  void write(const fs::path& path, const Globals& g, const KeyValueConfig& cfg, unsigned jobs, int exitCode) const {
    json config = json::object();
    for (const auto& [k, v] : cfg.values()) config[k] = v;
    const json j = {{"tool", "ladderkit"},   {"command", command}, {"seed", g.seed},
                    {"jobs", jobs},          {"config", config},   {"arguments", arguments},
                    {"inputs", inputs},      {"outputs", outputs}, {"exit_code", exitCode}};
    write_text(path, j.dump(1) + "\n");
  }
};

fs::path manifest_path(const Globals& g, const fs::path& fallback) {
  return g.runManifest.empty() ? fallback : fs::path(g.runManifest);
}

// ---- backends ----------------------------------------------------------------------

std::shared_ptr<EncoderBackend> make_backend(const KeyValueConfig& cfg, const Globals& g, RunManifest& run) {
  const std::string kind = cfg.get_or("backend", "synthetic");
  if (kind == "synthetic") {
    const auto models = cfg.get("synthetic_models");
    if (!models) throw ConfigError("synthetic backend needs synthetic_models = <csv>");
    const fs::path p = cfg.resolve(*models);
    run.input(p);
    SyntheticNoise noise;
    noise.psnrSigmaDb = number(cfg, "noise_psnr_db", noise.psnrSigmaDb);
    noise.rateSigmaRel = number(cfg, "noise_rate_rel", noise.rateSigmaRel);
    noise.seed = static_cast<std::uint64_t>(number(cfg, "noise_seed", static_cast<double>(g.seed)));
    try {
      return std::make_shared<SyntheticBackend>(read_synthetic_models(p), noise);
    } catch (const LadderError& e) {
      throw ConfigError(e.what());
    }
  }
  if (kind == "external") {
    const auto manifest = cfg.get("manifest");
    if (!manifest) throw ConfigError("external backend needs manifest = <csv>");
    ExternalCommands cmd;
    cmd.encoder = cfg.get_or("encoder_cmd", "");
    cmd.decoder = cfg.get_or("decoder_cmd", "");
    if (cmd.encoder.empty() || cmd.decoder.empty()) throw ConfigError("external backend needs encoder_cmd and decoder_cmd");
    if (const auto wd = cfg.get("work_dir")) cmd.workDir = cfg.resolve(*wd);
    cmd.gopLength = integer(cfg, "gop_length", 16);
    std::map<std::string, SourceSpec> sources;
    const fs::path mp = cfg.resolve(*manifest);
    run.input(mp);
    try {
      for (const auto& e : read_manifest(mp)) sources[e.id] = {e.path, e.geometry};
    } catch (const LadderError& e) {
      throw ConfigError(e.what());
    }
    return std::make_shared<ExternalBackend>(std::move(sources), std::move(cmd));
  }
  throw ConfigError("unknown backend '" + kind + "' (synthetic or external)");
}

std::vector<std::string> all_sequence_ids(const KeyValueConfig& cfg) {
  std::vector<std::string> ids;
  if (cfg.get_or("backend", "synthetic") == "synthetic") {
    for (const auto& [id, m] : read_synthetic_models(cfg.resolve(*cfg.get("synthetic_models")))) ids.push_back(id);
  } else {
    for (const auto& e : read_manifest(cfg.resolve(*cfg.get("manifest")))) ids.push_back(e.id);
  }
  return ids;
}

// ---- features / describe ---------------------------------------------------------

struct FeaturesArgs {
  std::string manifest;
  std::string out;
};

int cmd_features(const Globals& g, const FeaturesArgs& a) {
  const KeyValueConfig cfg = load_config(g);
  const unsigned jobs = jobs_of(g, cfg);
  RunManifest run;
  run.command = "features";
  run.arguments = {{"manifest", a.manifest}, {"out", a.out}};
  run.input(a.manifest);
  std::vector<ManifestEntry> entries;
  try {
    entries = read_manifest(a.manifest);
  } catch (const LadderError& e) {
    throw ConfigError(e.what());
  }
  if (entries.empty()) throw ConfigError("manifest lists no sequences");

  std::vector<FeatureRow> rows;
  CsvTable errors;
  errors.header = {"sequence_id", "error"};
  for (const auto& e : entries) {
    try {
      run.input(e.path);
      const YuvFileSequence seq(e.path, e.geometry);
      rows.push_back({e.id, extract_features(seq, jobs)});
    } catch (const std::exception& ex) {
      std::cerr << "features: " << e.id << ": " << ex.what() << "\n";
      errors.rows.push_back({e.id, ex.what()});
    }
  }
  const fs::path errPath = a.out + ".errors.csv";
  if (!rows.empty()) {
    write_features_csv(a.out, rows);
    run.output(a.out);
  }
  if (!errors.rows.empty()) {
    write_csv(errPath, errors);
    run.output(errPath);
  } else {
    std::error_code ec;
    fs::remove(errPath, ec);
  }
  const int code = errors.rows.empty() ? kExitOk : kExitPartial;
  run.write(manifest_path(g, a.out + ".run.json"), g, cfg, jobs, code);
  std::cout << rows.size() << " of " << entries.size() << " sequences written to " << a.out << "\n";
  return code;
}

int cmd_describe(const Globals& g, const FeaturesArgs& a) {
  const KeyValueConfig cfg = load_config(g);
  const unsigned jobs = jobs_of(g, cfg);
  RunManifest run;
  run.command = "describe";
  run.arguments = {{"manifest", a.manifest}, {"out", a.out}};
  run.input(a.manifest);
  std::vector<ManifestEntry> entries;
  try {
    entries = read_manifest(a.manifest);
  } catch (const LadderError& e) {
    throw ConfigError(e.what());
  }
  CsvTable t;
  t.header = {"sequence_id", "si", "ti", "mv", "cf"};
  int failed = 0;
  for (const auto& e : entries) {
    try {
      run.input(e.path);
      const YuvFileSequence seq(e.path, e.geometry);
      const DatasetDescriptor d = dataset_descriptors(seq, jobs);
      t.rows.push_back({e.id, format_double(d.si), format_double(d.ti), format_double(d.mv), format_double(d.cf)});
    } catch (const std::exception& ex) {
      std::cerr << "describe: " << e.id << ": " << ex.what() << "\n";
      ++failed;
    }
  }
  write_csv(a.out, t);
  run.output(a.out);
  const int code = failed ? kExitPartial : kExitOk;
  run.write(manifest_path(g, a.out + ".run.json"), g, cfg, jobs, code);
  return code;
}

// ---- train -------------------------------------------------------------------------

struct TrainArgs {
  std::string features;
  std::string truth;
  std::string out;
  std::string selectorRuns;
  int folds = 10;
  bool noRfe = false;
};

int cmd_train(const Globals& g, const TrainArgs& a) {
  const KeyValueConfig cfg = load_config(g);
  const unsigned jobs = jobs_of(g, cfg);
  RunManifest run;
  run.command = "train";
  run.arguments = {{"features", a.features}, {"truth", a.truth},   {"out", a.out},
                   {"folds", a.folds},       {"no_rfe", a.noRfe}, {"selector_runs", a.selectorRuns}};
  run.input(a.features);
  run.input(a.truth);

  const auto names = crossover_names(default_resolutions());
  std::vector<FeatureRow> feats;
  std::vector<TruthRow> truth;
  try {
    feats = read_features_csv(a.features);
    truth = read_truth_csv(a.truth, names);
  } catch (const LadderError& e) {
    throw ConfigError(e.what());
  }
  if (feats.empty() || truth.empty()) throw ConfigError("training needs non-empty feature and ground-truth tables");
  std::map<std::string, const TruthRow*> byId;
  for (const auto& t : truth) byId[t.id] = &t;
  std::vector<FeatureVector> x;
  std::vector<std::vector<double>> y;
  std::vector<std::string> ids;
  for (const auto& f : feats) {
    const auto it = byId.find(f.id);
    if (it == byId.end()) throw ConfigError("no ground truth for sequence " + f.id);
    x.push_back(f.features);
    y.push_back(it->second->qps);
    ids.push_back(f.id);
  }

  TrainOptions opts;
  opts.qps = qp_range(cfg);
  opts.selectFeatures = !a.noRfe;
  opts.rfe.folds = a.folds;
  opts.rfe.seed = g.seed;
  opts.rfe.gp.seed = g.seed;
  opts.rfe.gp.restarts = integer(cfg, "gp_restarts", opts.rfe.gp.restarts);
  TrainResult trained;
  try {
    trained = train_crossover_predictor(x, y, names, opts);
  } catch (const LadderError& e) {
    throw ConfigError(e.what());
  }

  ModelBundle bundle;
  bundle.predictor = trained.predictor;
  {
    const std::string text = read_text(a.features) + "\x1f" + read_text(a.truth);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(text.data(), text.size())));
    bundle.trainingHash = buf;
  }

  if (!a.selectorRuns.empty()) {
    run.input(a.selectorRuns);
    const CsvTable t = read_csv(a.selectorRuns);
    const auto cId = t.column("sequence_id"), cIl = t.column("bd_rate_il"), cFl = t.column("bd_rate_fl");
    std::map<std::string, const FeatureVector*> fv;
    for (std::size_t i = 0; i < ids.size(); ++i) fv[ids[i]] = &x[i];
    std::vector<SelectorRun> runs;
    for (const auto& row : t.rows) {
      const auto it = fv.find(row[cId]);
      if (it == fv.end()) throw ConfigError("selector run for unknown sequence " + row[cId]);
      runs.push_back({*it->second, parse_double(row[cIl]), parse_double(row[cFl])});
    }
    SelectorOptions so;
    so.threshold = number(cfg, "hl_threshold", so.threshold);
    so.seed = g.seed;
    const SelectorFit fit = fit_selector(runs, so);
    for (const auto& w : fit.warnings) std::cerr << "train: " << w << "\n";
    std::cout << "selector: " << fit.ilCount << " IL / " << fit.flCount << " FL labels, CV accuracy "
              << format_double(fit.cvAccuracy) << "\n";
    bundle.selector = fit.selector;
  }
  save_bundle(a.out, bundle);
  run.output(a.out);

  CsvTable report;
  report.header = {"target", "features", "lcc", "srocc", "r2", "r2_fold_mean", "mae", "rmse"};
  for (const auto& r : trained.report) {
    std::string fs;
    for (int f : r.features) fs += (fs.empty() ? "F" : " F") + std::to_string(f);
    report.rows.push_back({r.name, fs, format_double(r.metrics.lcc), format_double(r.metrics.srocc),
                           format_double(r.metrics.r2), format_double(r.r2FoldMean), format_double(r.metrics.mae),
                           format_double(r.metrics.rmse)});
    std::cout << r.name << "  [" << fs << "]  LCC " << format_double(r.metrics.lcc) << "  MAE "
              << format_double(r.metrics.mae) << "\n";
  }
  const fs::path reportPath = a.out + ".report.csv";
  write_csv(reportPath, report);
  run.output(reportPath);

  CsvTable rel;
  rel.header = {"x", "y", "slope", "intercept", "lcc"};
  for (std::size_t k = 0; k + 1 < names.size(); ++k) {
    std::vector<double> px, py;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      px.push_back(opts.qps.clip(static_cast<int>(std::lround(trained.outOfFold[k][i]))));
      py.push_back(opts.qps.clip(static_cast<int>(std::lround(trained.outOfFold[k + 1][i]))));
    }
    try {
      const auto r = fit_cross_relation(px, py);
      rel.rows.push_back({names[k], names[k + 1], format_double(r.slope), format_double(r.intercept), format_double(r.lcc)});
    } catch (const LadderError& e) {
      std::cerr << "train: relation " << names[k] << " -> " << names[k + 1] << ": " << e.what() << "\n";
    }
  }
  const fs::path relPath = a.out + ".relations.csv";
  write_csv(relPath, rel);
  run.output(relPath);
  run.write(manifest_path(g, a.out + ".run.json"), g, cfg, jobs, kExitOk);
  return kExitOk;
}

// ---- ladder ------------------------------------------------------------------------

struct LadderArgs {
  std::string method;
  std::vector<std::string> sequences;
  std::string out;
  std::string bundle;
  std::string features;
};

int cmd_ladder(const Globals& g, const LadderArgs& a) {
  const KeyValueConfig cfg = load_config(g);
  const unsigned jobs = jobs_of(g, cfg);
  LadderMethod method;
  try {
    method = parse_method(a.method);
  } catch (const LadderError& e) {
    throw ConfigError(e.what());
  }
  RunManifest run;
  run.command = "ladder";
  run.arguments = {{"method", a.method}, {"sequences", a.sequences}, {"out", a.out}, {"bundle", a.bundle},
                   {"features", a.features}};

  MethodContext ctx;
  ctx.qps = qp_range(cfg);
  ctx.ladder = ladder_config(cfg);
  ctx.profile = cfg.get_or("profile", "RA");
  ILConfig il;
  il.samples = integer(cfg, "il_samples", il.samples);
  try {
    il_sample_qps(ctx.qps, il.samples);
  } catch (const LadderError& e) {
    throw ConfigError(e.what());
  }

  std::optional<ModelBundle> bundle;
  std::map<std::string, FeatureVector> features;
  if (method == LadderMethod::FL || method == LadderMethod::HL) {
    const std::string bundlePath = a.bundle.empty() ? cfg.get_or("bundle", "") : a.bundle;
    const std::string featurePath = a.features.empty() ? cfg.get_or("features", "") : a.features;
    if (bundlePath.empty()) throw ConfigError(a.method + " needs a model bundle (--bundle)");
    if (featurePath.empty()) throw ConfigError(a.method + " needs a features CSV (--features)");
    try {
      bundle = load_bundle(bundlePath);
      for (auto& r : read_features_csv(featurePath)) features[r.id] = r.features;
    } catch (const LadderError& e) {
      throw ConfigError(e.what());
    }
    run.input(bundlePath);
    run.input(featurePath);
    if (method == LadderMethod::HL && !bundle->selector) throw ConfigError("model bundle has no method selector for hl");
  }

  AdapterOptions ao;
  ao.workers = jobs;
  if (const auto log = cfg.get("log")) ao.logPath = cfg.resolve(*log);
  EncodeAdapter adapter(make_backend(cfg, g, run), ao);
  ctx.adapter = &adapter;

  std::vector<std::string> ids = a.sequences;
  if (ids.empty()) {
    try {
      ids = all_sequence_ids(cfg);
    } catch (const LadderError& e) {
      throw ConfigError(e.what());
    }
  }
  if (ids.empty()) throw ConfigError("no sequences to process");

  int failed = 0;
  long backendCalls = 0;
  for (const auto& id : ids) {
    try {
      MethodOutcome o;
      switch (method) {
        case LadderMethod::RL: o = run_rl(ctx, id); break;
        case LadderMethod::IL: o = run_il(ctx, id, il); break;
        case LadderMethod::FL:
        case LadderMethod::HL: {
          const auto it = features.find(id);
          if (it == features.end()) throw LadderError("no features for sequence " + id);
          o = method == LadderMethod::FL ? run_fl(ctx, id, it->second, bundle->predictor, il)
                                         : run_hl(ctx, id, it->second, *bundle->selector, bundle->predictor, il);
          break;
        }
      }
      backendCalls += o.budget.backendCalls;
      const LadderRecord rec = make_record(id, o);
      const fs::path csv = fs::path(a.out) / (id + ".csv"), js = fs::path(a.out) / (id + ".json");
      write_text(csv, ladder_csv(rec));
      write_text(js, ladder_json(rec));
      run.output(csv);
      run.output(js);
      std::cout << id << ": " << rec.ladder.rungs.size() << " rungs, " << rec.budget.total() << " encodes ("
                << to_string(rec.ran) << ")\n";
    } catch (const EncodeError& e) {
      ++failed;
      std::cerr << "ladder: " << id << ": " << e.what() << "\n" << e.diagnostics() << "\n";
    } catch (const LadderError& e) {
      ++failed;
      std::cerr << "ladder: " << id << ": " << e.what() << "\n";
    }
  }
  run.arguments["backend_calls"] = backendCalls;
  const int code = failed ? kExitPartial : kExitOk;
  run.write(manifest_path(g, fs::path(a.out) / ("run-" + to_string(method) + ".json")), g, cfg, jobs, code);
  return code;
}

// ---- evaluate ----------------------------------------------------------------------

struct EvaluateArgs {
  std::string reference;
  std::string test;
  std::string out;
  std::string bdMethod = "pchip";
  int bins = 10;
};

std::map<std::string, std::pair<fs::path, LadderRecord>> load_records(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json" && e.path().filename().string().rfind("run-", 0) != 0) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::map<std::string, std::pair<fs::path, LadderRecord>> out;
  for (const auto& f : files) {
    LadderRecord r = parse_ladder_json(read_text(f));
    const std::string id = r.id;
    out[id] = {f, std::move(r)};
  }
  return out;
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int cmd_evaluate(const Globals& g, const EvaluateArgs& a) {
  const KeyValueConfig cfg = load_config(g);
  const unsigned jobs = jobs_of(g, cfg);
  BdInterpolation bdm;
  if (a.bdMethod == "pchip") bdm = BdInterpolation::Pchip;
  else if (a.bdMethod == "poly") bdm = BdInterpolation::Polynomial;
  else throw ConfigError("--bd-method must be pchip or poly");

  RunManifest run;
  run.command = "evaluate";
  run.arguments = {{"reference", a.reference}, {"test", a.test}, {"out", a.out}, {"bd_method", a.bdMethod},
                   {"bins", a.bins}};
  std::map<std::string, std::pair<fs::path, LadderRecord>> ref, tst;
  try {
    ref = load_records(a.reference);
    tst = load_records(a.test);
  } catch (const ConfigError&) {
    throw;
  } catch (const LadderError& e) {
    throw ConfigError(e.what());
  }

  CsvTable per;
  per.header = {"sequence_id", "comparable", "bd_rate_percent", "bd_psnr_db", "pf_hits_percent",
                "reference_rungs", "test_rungs", "test_encodes", "note"};
  std::vector<double> bdRate, bdPsnr, hits, encodes;
  std::vector<std::string> skipped;
  for (const auto& [id, t] : tst) {
    const auto it = ref.find(id);
    if (it == ref.end()) {
      std::cerr << "evaluate: no reference ladder for " << id << "; skipped\n";
      skipped.push_back(id);
      continue;
    }
    run.input(it->second.first);
    run.input(t.first);
    const LadderRecord& r = it->second.second;
    const LadderRecord& x = t.second;
    const BDReport bd = bd_metrics(r.ladder, x.ladder, bdm);
    const double h = r.front ? pf_hits(x.ladder, *r.front) : std::nan("");
    if (bd.comparable) {
      bdRate.push_back(bd.bdRatePercent);
      bdPsnr.push_back(bd.bdPsnrDb);
    }
    if (std::isfinite(h)) hits.push_back(h);
    encodes.push_back(x.budget.total());
    per.rows.push_back({id, bd.comparable ? "1" : "0", bd.comparable ? format_double(bd.bdRatePercent) : "",
                        bd.comparable ? format_double(bd.bdPsnrDb) : "", std::isfinite(h) ? format_double(h) : "",
                        std::to_string(r.ladder.rungs.size()), std::to_string(x.ladder.rungs.size()),
                        std::to_string(x.budget.total()), bd.reason});
  }
  for (const auto& [id, r] : ref)
    if (!tst.count(id)) {
      std::cerr << "evaluate: no test ladder for " << id << "; skipped\n";
      skipped.push_back(id);
    }
  if (per.rows.empty()) {
    std::cerr << "evaluate: no sequence ids in common\n";
    run.write(manifest_path(g, fs::path(a.out) / "run-evaluate.json"), g, cfg, jobs, kExitPartial);
    return kExitPartial;
  }

  const fs::path out(a.out);
  write_csv(out / "per_sequence.csv", per);
  run.output(out / "per_sequence.csv");
  json summary = {{"sequences", per.rows.size()}, {"comparable", bdRate.size()}, {"skipped", skipped}};
  auto block = [&](const char* name, const std::vector<double>& v) {
    if (v.empty()) {
      summary[name] = nullptr;
      return;
    }
    const Summary s = summarize(v, a.bins);
    summary[name] = {{"mean", nullable(s.mean)}, {"mad", nullable(s.mad)}};
    CsvTable hist;
    hist.header = {"bin_edge", "count"};
    for (std::size_t i = 0; i < s.hist.counts.size(); ++i)
      hist.rows.push_back({format_double(s.hist.edges[i]), std::to_string(s.hist.counts[i])});
    const fs::path hp = out / (std::string("hist_") + name + ".csv");
    write_csv(hp, hist);
    run.output(hp);
  };
  block("bd_rate_percent", bdRate);
  block("bd_psnr_db", bdPsnr);
  block("pf_hits_percent", hits);
  summary["mean_encodes"] = mean(encodes);
  write_text(out / "summary.json", summary.dump(1) + "\n");
  run.output(out / "summary.json");
  std::cout << summary.dump(1) << "\n";
  run.write(manifest_path(g, out / "run-evaluate.json"), g, cfg, jobs, kExitOk);
  return kExitOk;
}

// ---- synth ---------------------------------------------------------------------------

struct SynthArgs {
  int count = 30;
  std::string out;
  std::string prefix = "syn";
  bool noisy = false;
};

int cmd_synth(const Globals& g, const SynthArgs& a) {
  const KeyValueConfig cfg = load_config(g);
  RunManifest run;
  run.command = "synth";
  run.arguments = {{"count", a.count}, {"out", a.out}, {"prefix", a.prefix}, {"noisy", a.noisy}};
  OracleOptions o;
  o.count = a.count;
  o.seed = g.seed;
  o.prefix = a.prefix;
  std::vector<OracleSequence> corpus;
  try {
    corpus = make_oracle_corpus(o);
  } catch (const LadderError& e) {
    throw ConfigError(e.what());
  }
  const fs::path dir(a.out);
  const auto res = default_resolutions();
  const auto names = crossover_names(res);
  write_synthetic_models(dir / "models.csv", oracle_models(corpus), res);

  std::vector<FeatureRow> feats;
  std::vector<TruthRow> truth;
  for (const auto& s : corpus) {
    feats.push_back({s.id, s.features});
    TruthRow t{s.id, {}};
    for (double q : s.crossQp) t.qps.push_back(std::round(q));
    truth.push_back(std::move(t));
  }
  write_features_csv(dir / "features.csv", feats);
  write_truth_csv(dir / "truth.csv", names, truth);
  std::string adapter = "backend = synthetic\nsynthetic_models = models.csv\n";
  adapter += a.noisy ? "noise_psnr_db = 0.1\nnoise_rate_rel = 0.01\n" : "noise_psnr_db = 0\nnoise_rate_rel = 0\n";
  write_text(dir / "adapter.cfg", adapter);
  for (const char* f : {"models.csv", "features.csv", "truth.csv", "adapter.cfg"}) run.output(dir / f);
  run.write(manifest_path(g, dir / "run-synth.json"), g, cfg, 1, kExitOk);
  std::cout << corpus.size() << " oracle sequences written to " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Content-adaptive bitrate ladder toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads (default: config 'workers' or 1)");
  app.add_option("--config", g.config, "key = value configuration file");
  app.add_option("--set", g.sets, "Override a config key (key=value)")->take_all();
  app.add_option("--run-manifest", g.runManifest, "Where to write the run manifest");

  FeaturesArgs fa, da;
  auto* features = app.add_subcommand("features", "Extract F1-F23 for every sequence in a manifest");
  features->add_option("--manifest", fa.manifest, "Manifest CSV")->required();
  features->add_option("--out", fa.out, "Output features CSV")->required();

  auto* describe = app.add_subcommand("describe", "SI, TI, MV and CF per sequence");
  describe->add_option("--manifest", da.manifest, "Manifest CSV")->required();
  describe->add_option("--out", da.out, "Output CSV")->required();

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Fit the cross-over QP models (and optionally the selector)");
  train->add_option("--features", ta.features, "Features CSV")->required();
  train->add_option("--truth", ta.truth, "Ground-truth cross-over QP CSV")->required();
  train->add_option("--out", ta.out, "Output model bundle (JSON)")->required();
  train->add_option("--selector-runs", ta.selectorRuns, "CSV of sequence_id, bd_rate_il, bd_rate_fl");
  train->add_option("--folds", ta.folds, "Cross-validation folds")->capture_default_str();
  train->add_flag("--no-rfe", ta.noRfe, "Use all features instead of recursive elimination");

  LadderArgs la;
  auto* lad = app.add_subcommand("ladder", "Build ladders with rl, il, fl or hl");
  lad->add_option("--method", la.method, "rl, il, fl or hl")->required();
  lad->add_option("--sequence", la.sequences, "Sequence id (repeatable; default: all)");
  lad->add_option("--out", la.out, "Output directory")->required();
  lad->add_option("--bundle", la.bundle, "Model bundle for fl/hl");
  lad->add_option("--features", la.features, "Features CSV for fl/hl");

  EvaluateArgs ea;
  auto* eval = app.add_subcommand("evaluate", "BD metrics and PF-hits of test ladders against reference ladders");
  eval->add_option("--reference", ea.reference, "Directory of reference ladder JSON files")->required();
  eval->add_option("--test", ea.test, "Directory of test ladder JSON files")->required();
  eval->add_option("--out", ea.out, "Output directory")->required();
  eval->add_option("--bd-method", ea.bdMethod, "pchip or poly")->capture_default_str();
  eval->add_option("--bins", ea.bins, "Histogram bins")->capture_default_str();

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Write a linear-oracle corpus for the synthetic backend");
  synth->add_option("--count", sa.count, "Number of sequences")->capture_default_str();
  synth->add_option("--out", sa.out, "Output directory")->required();
  synth->add_option("--prefix", sa.prefix, "Sequence id prefix")->capture_default_str();
  synth->add_flag("--noisy", sa.noisy, "Enable the default encoder noise in adapter.cfg");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*features) return cmd_features(g, fa);
    if (*describe) return cmd_describe(g, da);
    if (*train) return cmd_train(g, ta);
    if (*lad) return cmd_ladder(g, la);
    if (*eval) return cmd_evaluate(g, ea);
    if (*synth) return cmd_synth(g, sa);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartial;
  }
  return kExitConfig;
}
