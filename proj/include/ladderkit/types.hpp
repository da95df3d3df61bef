#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ladder {

/// Base error for everything thrown by the toolkit.
class LadderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Resolution {
  int width = 0;
  int height = 0;
  std::string label;

  long long pixels() const { return static_cast<long long>(width) * height; }
  bool operator==(const Resolution& o) const { return width == o.width && height == o.height; }
  bool operator!=(const Resolution& o) const { return !(*this == o); }
};

/// Ordered descending by pixel count; labels unique.
using ResolutionSet = std::vector<Resolution>;

/// Validates and sorts a resolution list (descending pixel count).
ResolutionSet make_resolution_set(std::vector<Resolution> list);

/// {2160p, 1080p, 720p, 540p}.
ResolutionSet default_resolutions();

/// Looks a resolution up by label; throws if absent.
const Resolution& find_resolution(const ResolutionSet& set, const std::string& label);

/// Inclusive integer QP range.
struct QpRange {
  int min = 15;
  int max = 45;

  int size() const { return max - min + 1; }
  bool contains(int qp) const { return qp >= min && qp <= max; }
  int clip(int qp) const { return qp < min ? min : (qp > max ? max : qp); }
  double mid() const { return 0.5 * (min + max); }
  std::vector<int> values() const;
};

struct RQPoint {
  double rate = 0.0;     // kbps
  double logRate = 0.0;  // log2(rate)
  double quality = 0.0;  // dB
  int qp = 0;
  Resolution resolution;

  static RQPoint make(double rateKbps, double qualityDb, int qp, Resolution res);
};

struct RQCurve {
  Resolution resolution;
  std::vector<RQPoint> points;  // qp ascending
};

struct ParetoFront {
  std::vector<RQPoint> tuples;  // rate ascending
  ResolutionSet sourceCurves;

  bool contains(const Resolution& res, int qp) const;
};

enum class CrossLevel { High, Low };

struct CrossOverQP {
  Resolution resolution;
  CrossLevel level = CrossLevel::High;
  int qp = 0;
  std::optional<double> rateAtQP;
};

/// One intersection between adjacent-resolution curves. `high` lives on the
/// higher resolution, `low` on the lower one.
struct CrossOverPair {
  CrossOverQP high;
  CrossOverQP low;
  double logRate = 0.0;  // continuous intersection
  double quality = 0.0;
};

struct LadderConfig {
  double rMin = 150.0;
  double rMax = 25000.0;
  std::optional<double> qMax;
  double epsilon = 0.5;  // dB per log2-rate unit
  double doublingFactor = 2.0;
  double concavityToleranceDb = 0.3;

  void validate() const;
};

enum class LadderMethod { RL, IL, FL, HL };

std::string to_string(LadderMethod m);
LadderMethod parse_method(const std::string& s);

struct Rung {
  double targetRate = 0.0;
  double rate = 0.0;
  double logRate = 0.0;
  double quality = 0.0;
  int qp = 0;
  Resolution resolution;
};

struct BitrateLadder {
  std::vector<Rung> rungs;  // rate ascending
  LadderMethod method = LadderMethod::RL;
  int encodeCount = 0;
  std::vector<std::string> warnings;
};

}  // namespace ladder
