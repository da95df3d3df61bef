#include "ladderkit/bundle.hpp"

#include <json.hpp>

#include "ladderkit/io.hpp"

namespace ladder {

using nlohmann::json;

namespace {

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }
json vec(const Eigen::RowVectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd to_vector(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json gp_json(const GaussianProcess& gp) {
  const auto s = gp.state();
  json rows = json::array();
  for (Eigen::Index r = 0; r < s.xs.rows(); ++r) rows.push_back(vec(Eigen::RowVectorXd(s.xs.row(r))));
  return {{"x_mean", vec(s.xMean)},           {"x_scale", vec(s.xScale)},   {"y_mean", s.yMean},
          {"y_scale", s.yScale},              {"inputs", rows},             {"weights", vec(s.weights)},
          {"log_length", s.hyper.logLength},  {"log_signal", s.hyper.logSignal},
          {"log_noise", s.hyper.logNoise},    {"noise_variance", s.noiseVariance},
          {"jitter", s.jitter}};
}

GaussianProcess gp_from(const json& j) {
  GaussianProcess::State s;
  s.xMean = to_vector(j.at("x_mean")).transpose();
  s.xScale = to_vector(j.at("x_scale")).transpose();
  s.yMean = j.at("y_mean").get<double>();
  s.yScale = j.at("y_scale").get<double>();
  const auto& rows = j.at("inputs");
  s.xs.resize(static_cast<Eigen::Index>(rows.size()), s.xMean.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Eigen::VectorXd row = to_vector(rows[r]);
    if (row.size() != s.xMean.size()) throw LadderError("bundle: training input row has the wrong width");
    s.xs.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  s.weights = to_vector(j.at("weights"));
  if (s.weights.size() != s.xs.rows() || s.xScale.size() != s.xMean.size())
    throw LadderError("bundle: inconsistent GP dimensions");
  s.hyper.logLength = j.at("log_length").get<double>();
  s.hyper.logSignal = j.at("log_signal").get<double>();
  s.hyper.logNoise = j.at("log_noise").get<double>();
  s.noiseVariance = j.at("noise_variance").get<double>();
  s.jitter = j.at("jitter").get<double>();
  return GaussianProcess::from_state(s);
}

json selector_json(const MethodSelector& sel) {
  json trees = json::array();
  for (const auto& t : sel.ensemble.trees()) {
    json nodes = json::array();
    for (const auto& n : t.nodes()) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.label});
    trees.push_back(nodes);
  }
  return {{"threshold", sel.threshold},
          {"constant", sel.constant ? json(to_string(*sel.constant)) : json(nullptr)},
          {"trees", trees}};
}

MethodSelector selector_from(const json& j) {
  MethodSelector sel;
  sel.threshold = j.at("threshold").get<double>();
  if (!j.at("constant").is_null()) sel.constant = parse_method(j.at("constant").get<std::string>());
  std::vector<DecisionTree> trees;
  for (const auto& t : j.at("trees")) {
    std::vector<DecisionTree::Node> nodes;
    for (const auto& n : t)
      nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(), n.at(3).get<int>(),
                       n.at(4).get<int>()});
    trees.push_back(DecisionTree::from_nodes(std::move(nodes)));
  }
  if (!sel.constant && trees.empty()) throw LadderError("bundle: selector has no trees");
  if (!trees.empty()) sel.ensemble = BaggedTrees::from_trees(std::move(trees));
  return sel;
}

}  // namespace

std::string bundle_to_json(const ModelBundle& bundle) {
  json models = json::array();
  for (const auto& m : bundle.predictor.models)
    models.push_back({{"name", m.name}, {"features", m.features}, {"gp", gp_json(m.gp)}});
  json j = {{"format", "ladderkit-model-bundle"},
            {"version", kBundleVersion},
            {"training_hash", bundle.trainingHash},
            {"qp_range", {bundle.predictor.qps.min, bundle.predictor.qps.max}},
            {"crossover_models", models},
            {"selector", bundle.selector ? selector_json(*bundle.selector) : json(nullptr)}};
  return j.dump(1) + "\n";
}

ModelBundle bundle_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "ladderkit-model-bundle") throw LadderError("not a model bundle");
    const int version = j.at("version").get<int>();
    if (version != kBundleVersion) throw LadderError("unsupported bundle version " + std::to_string(version));
    ModelBundle b;
    b.trainingHash = j.at("training_hash").get<std::string>();
    b.predictor.qps = {j.at("qp_range").at(0).get<int>(), j.at("qp_range").at(1).get<int>()};
    for (const auto& m : j.at("crossover_models")) {
      CrossoverModel cm;
      cm.name = m.at("name").get<std::string>();
      cm.features = m.at("features").get<std::vector<int>>();
      for (int f : cm.features)
        if (f < 1 || f > FeatureVector::kCount) throw LadderError("bundle: feature index out of range");
      cm.gp = gp_from(m.at("gp"));
      if (static_cast<std::size_t>(cm.gp.state().xMean.size()) != cm.features.size())
        throw LadderError("bundle: model " + cm.name + " has mismatched feature count");
      b.predictor.models.push_back(std::move(cm));
    }
    if (!j.at("selector").is_null()) b.selector = selector_from(j.at("selector"));
    return b;
  } catch (const json::exception& e) {
    throw LadderError(std::string("malformed model bundle: ") + e.what());
  }
}

void save_bundle(const std::filesystem::path& path, const ModelBundle& bundle) {
  write_text(path, bundle_to_json(bundle));
}

ModelBundle load_bundle(const std::filesystem::path& path) { return bundle_from_json(read_text(path)); }

}  // namespace ladder
