#include "ladderkit/report.hpp"

#include <json.hpp>

#include <sstream>

#include "ladderkit/io.hpp"

namespace ladder {

using nlohmann::json;

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const auto cId = t.column("id"), cPath = t.column("path"), cW = t.column("width"), cH = t.column("height"),
             cFps = t.column("fps"), cBd = t.column("bit_depth"), cF = t.column("frames");
  std::vector<ManifestEntry> out;
  for (const auto& row : t.rows) {
    ManifestEntry e;
    e.id = row[cId];
    if (e.id.empty()) throw LadderError(path.string() + ": empty sequence id");
    e.path = row[cPath];
    if (e.path.is_relative()) e.path = path.parent_path() / e.path;
    e.geometry.width = parse_int(row[cW]);
    e.geometry.height = parse_int(row[cH]);
    e.geometry.fps = parse_double(row[cFps]);
    e.geometry.bitDepth = parse_int(row[cBd]);
    e.geometry.frames = parse_int(row[cF]);
    out.push_back(std::move(e));
  }
  return out;
}

void write_features_csv(const std::filesystem::path& path, const std::vector<FeatureRow>& rows) {
  CsvTable t;
  t.header = {"sequence_id"};
  for (int f = 1; f <= FeatureVector::kContent; ++f) t.header.push_back("f" + std::to_string(f));
  for (const auto& r : rows) {
    std::vector<std::string> line{r.id};
    for (int f = 1; f <= FeatureVector::kContent; ++f) line.push_back(format_double(r.features.f(f)));
    t.rows.push_back(std::move(line));
  }
  write_csv(path, t);
}

std::vector<FeatureRow> read_features_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const auto cId = t.column("sequence_id");
  std::vector<std::size_t> cols;
  for (int f = 1; f <= FeatureVector::kContent; ++f) cols.push_back(t.column("f" + std::to_string(f)));
  std::vector<FeatureRow> out;
  for (const auto& row : t.rows) {
    FeatureRow r;
    r.id = row[cId];
    for (int f = 1; f <= FeatureVector::kContent; ++f) {
      const double v = parse_double(row[cols[static_cast<std::size_t>(f - 1)]]);
      if (!std::isfinite(v)) throw LadderError(path.string() + ": non-finite f" + std::to_string(f) + " for " + r.id);
      r.features.set(f, v);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TruthRow> read_truth_csv(const std::filesystem::path& path, const std::vector<std::string>& names) {
  const CsvTable t = read_csv(path);
  const auto cId = t.column("sequence_id");
  std::vector<std::size_t> cols;
  for (const auto& n : names) cols.push_back(t.column(n));
  std::vector<TruthRow> out;
  for (const auto& row : t.rows) {
    TruthRow r;
    r.id = row[cId];
    for (auto c : cols) r.qps.push_back(parse_double(row[c]));
    out.push_back(std::move(r));
  }
  return out;
}

void write_truth_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                     const std::vector<TruthRow>& rows) {
  CsvTable t;
  t.header = {"sequence_id"};
  t.header.insert(t.header.end(), names.begin(), names.end());
  for (const auto& r : rows) {
    std::vector<std::string> line{r.id};
    for (double q : r.qps) line.push_back(format_double(q));
    t.rows.push_back(std::move(line));
  }
  write_csv(path, t);
}

LadderRecord make_record(const std::string& id, const MethodOutcome& o) {
  LadderRecord r;
  r.id = id;
  r.ladder = o.ladder;
  r.ran = o.ran;
  r.budget = o.budget;
  r.front = o.front;
  r.crossovers = o.crossovers;
  r.predictedQps = o.predictedQps;
  r.switchRates = o.switchRates;
  return r;
}

std::string ladder_csv(const LadderRecord& record) {
  std::ostringstream os;
  os << "rung_index,target_kbps,achieved_kbps,psnr_db,qp,width,height,method\n";
  int i = 0;
  for (const auto& r : record.ladder.rungs)
    os << i++ << ',' << format_double(r.targetRate) << ',' << format_double(r.rate) << ',' << format_double(r.quality)
       << ',' << r.qp << ',' << r.resolution.width << ',' << r.resolution.height << ','
       << to_string(record.ladder.method) << '\n';
  return os.str();
}

namespace {

json res_json(const Resolution& r) { return {{"width", r.width}, {"height", r.height}, {"label", r.label}}; }

Resolution res_from(const json& j) {
  return {j.at("width").get<int>(), j.at("height").get<int>(), j.at("label").get<std::string>()};
}

json crossover_json(const CrossOverQP& c) {
  json j = {{"resolution", res_json(c.resolution)},
            {"level", c.level == CrossLevel::High ? "high" : "low"},
            {"qp", c.qp}};
  j["rate_kbps"] = c.rateAtQP ? json(*c.rateAtQP) : json(nullptr);
  return j;
}

CrossOverQP crossover_from(const json& j) {
  CrossOverQP c;
  c.resolution = res_from(j.at("resolution"));
  c.level = j.at("level") == "high" ? CrossLevel::High : CrossLevel::Low;
  c.qp = j.at("qp").get<int>();
  if (!j.at("rate_kbps").is_null()) c.rateAtQP = j.at("rate_kbps").get<double>();
  return c;
}

}  // namespace

std::string ladder_json(const LadderRecord& record) {
  json rungs = json::array();
  for (const auto& r : record.ladder.rungs)
    rungs.push_back({{"target_kbps", r.targetRate},
                     {"achieved_kbps", r.rate},
                     {"psnr_db", r.quality},
                     {"qp", r.qp},
                     {"resolution", res_json(r.resolution)}});
  json j = {{"sequence_id", record.id},
            {"method", to_string(record.ladder.method)},
            {"ran", to_string(record.ran)},
            {"budget",
             {{"initial_encodes", record.budget.initialEncodes},
              {"rung_encodes", record.budget.rungEncodes},
              {"total", record.budget.total()}}},
            {"rungs", rungs},
            {"warnings", record.ladder.warnings}};
  if (record.front) {
    json front = json::array();
    for (const auto& p : record.front->tuples)
      front.push_back({{"rate_kbps", p.rate}, {"psnr_db", p.quality}, {"qp", p.qp}, {"resolution", res_json(p.resolution)}});
    j["front"] = front;
  }
  if (!record.crossovers.empty()) {
    json cs = json::array();
    for (const auto& c : record.crossovers)
      cs.push_back({{"high", crossover_json(c.high)},
                    {"low", crossover_json(c.low)},
                    {"log_rate", c.logRate},
                    {"psnr_db", c.quality}});
    j["crossovers"] = cs;
  }
  if (!record.predictedQps.empty()) j["predicted_qps"] = record.predictedQps;
  if (!record.switchRates.empty()) j["switch_kbps"] = record.switchRates;
  return j.dump(1) + "\n";
}

LadderRecord parse_ladder_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    LadderRecord r;
    r.id = j.at("sequence_id").get<std::string>();
    r.ladder.method = parse_method(j.at("method").get<std::string>());
    r.ran = parse_method(j.at("ran").get<std::string>());
    r.budget.initialEncodes = j.at("budget").at("initial_encodes").get<int>();
    r.budget.rungEncodes = j.at("budget").at("rung_encodes").get<int>();
    r.ladder.encodeCount = r.budget.total();
    for (const auto& x : j.at("rungs")) {
      Rung rung;
      rung.targetRate = x.at("target_kbps").get<double>();
      rung.rate = x.at("achieved_kbps").get<double>();
      rung.logRate = std::log2(rung.rate);
      rung.quality = x.at("psnr_db").get<double>();
      rung.qp = x.at("qp").get<int>();
      rung.resolution = res_from(x.at("resolution"));
      r.ladder.rungs.push_back(rung);
    }
    r.ladder.warnings = j.at("warnings").get<std::vector<std::string>>();
    if (j.contains("front")) {
      ParetoFront f;
      for (const auto& p : j.at("front"))
        f.tuples.push_back(RQPoint::make(p.at("rate_kbps").get<double>(), p.at("psnr_db").get<double>(),
                                         p.at("qp").get<int>(), res_from(p.at("resolution"))));
      r.front = std::move(f);
    }
    if (j.contains("crossovers"))
      for (const auto& c : j.at("crossovers"))
        r.crossovers.push_back({crossover_from(c.at("high")), crossover_from(c.at("low")),
                                c.at("log_rate").get<double>(), c.at("psnr_db").get<double>()});
    if (j.contains("predicted_qps")) r.predictedQps = j.at("predicted_qps").get<std::vector<int>>();
    if (j.contains("switch_kbps")) r.switchRates = j.at("switch_kbps").get<std::vector<double>>();
    return r;
  } catch (const json::exception& e) {
    throw LadderError(std::string("malformed ladder JSON: ") + e.what());
  }
}

}  // namespace ladder
