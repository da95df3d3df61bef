#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "ladderkit/learn.hpp"
#include "ladderkit/selector.hpp"

namespace ladder {

inline constexpr int kBundleVersion = 1;

/// Trained cross-over predictor plus an optional method selector.
struct ModelBundle {
  CrossoverPredictor predictor;
  std::optional<MethodSelector> selector;
  std::string trainingHash;
};

std::string bundle_to_json(const ModelBundle& bundle);
ModelBundle bundle_from_json(const std::string& text);

void save_bundle(const std::filesystem::path& path, const ModelBundle& bundle);
ModelBundle load_bundle(const std::filesystem::path& path);

}  // namespace ladder
