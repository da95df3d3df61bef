#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ladderkit/features.hpp"
#include "ladderkit/frame.hpp"
#include "ladderkit/methods.hpp"

namespace ladder {

// ---- sequence manifest -------------------------------------------------------

/// Row of a manifest CSV: id, path, width, height, fps, bit_depth, frames.
struct ManifestEntry {
  std::string id;
  std::filesystem::path path;  // resolved against the manifest's directory
  YuvGeometry geometry;
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

// ---- feature tables ------------------------------------------------------------

struct FeatureRow {
  std::string id;
  FeatureVector features;
};

/// Columns sequence_id, f1..f23.
void write_features_csv(const std::filesystem::path& path, const std::vector<FeatureRow>& rows);
std::vector<FeatureRow> read_features_csv(const std::filesystem::path& path);

/// Columns sequence_id plus one per cross-over QP name.
struct TruthRow {
  std::string id;
  std::vector<double> qps;
};
std::vector<TruthRow> read_truth_csv(const std::filesystem::path& path, const std::vector<std::string>& names);
void write_truth_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                     const std::vector<TruthRow>& rows);

// ---- ladder records ----------------------------------------------------------------

/// What the ladder command writes per sequence, and evaluate reads back.
struct LadderRecord {
  std::string id;
  BitrateLadder ladder;
  LadderMethod ran = LadderMethod::RL;
  EncodeBudget budget;
  std::optional<ParetoFront> front;
  std::vector<CrossOverPair> crossovers;
  std::vector<int> predictedQps;
  std::vector<double> switchRates;
};

LadderRecord make_record(const std::string& id, const MethodOutcome& outcome);

/// CSV columns rung_index, target_kbps, achieved_kbps, psnr_db, qp, width,
/// height, method.
std::string ladder_csv(const LadderRecord& record);
std::string ladder_json(const LadderRecord& record);
LadderRecord parse_ladder_json(const std::string& text);

}  // namespace ladder
