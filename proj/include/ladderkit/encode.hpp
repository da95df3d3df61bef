#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ladderkit/frame.hpp"
#include "ladderkit/types.hpp"

namespace ladder {

struct EncodeRequest {
  std::string sequenceId;
  Resolution resolution;
  int qp = 0;
  std::string codecProfile = "RA";
};

struct EncodeResult {
  EncodeRequest request;
  double bitrateKbps = 0.0;
  double psnrDb = 0.0;
  std::vector<double> gopPsnrDb;  // empty when the backend only reports the mean
  double wallTimeSeconds = 0.0;
  std::string backendTag;
  bool cached = false;

  RQPoint point() const { return RQPoint::make(bitrateKbps, psnrDb, request.qp, request.resolution); }
};

/// Encoder failure with captured process output.
class EncodeError : public LadderError {
 public:
  EncodeError(const std::string& what, std::string diagnostics)
      : LadderError(what), diagnostics_(std::move(diagnostics)) {}
  const std::string& diagnostics() const { return diagnostics_; }

 private:
  std::string diagnostics_;
};

/// Encodes, decodes and measures one request. encode() may be called from
/// several threads at once.
class EncoderBackend {
 public:
  virtual ~EncoderBackend() = default;
  virtual std::string tag() const = 0;
  /// Content identity of a sequence, used in cache keys.
  virtual std::string sourceKey(const std::string& sequenceId) const = 0;
  virtual EncodeResult encode(const EncodeRequest& request) = 0;
};

// ---- synthetic backend -----------------------------------------------------

/// QP = alpha * log2(R) + beta and PSNR = q0 - q1 * QP for one resolution.
struct ResolutionModel {
  double alpha = -5.0;
  double beta = 80.0;
  double q0 = 55.0;
  double q1 = 0.5;

  double log_rate(double qp) const { return (qp - beta) / alpha; }
  double rate(double qp) const;
  double quality(double qp) const { return q0 - q1 * qp; }
};

struct SyntheticModel {
  std::map<std::string, ResolutionModel> byLabel;  // keyed by resolution label

  const ResolutionModel& at(const Resolution& r) const;
};

struct SyntheticNoise {
  double psnrSigmaDb = 0.1;
  double rateSigmaRel = 0.01;
  std::uint64_t seed = 0;

  static SyntheticNoise none() { return {0.0, 0.0, 0}; }
};

class SyntheticBackend : public EncoderBackend {
 public:
  SyntheticBackend(std::map<std::string, SyntheticModel> models, SyntheticNoise noise);

  std::string tag() const override { return "synthetic"; }
  std::string sourceKey(const std::string& sequenceId) const override;
  EncodeResult encode(const EncodeRequest& request) override;

  const SyntheticModel& model(const std::string& sequenceId) const;

 private:
  std::map<std::string, SyntheticModel> models_;
  SyntheticNoise noise_;
};

// ---- external backend ------------------------------------------------------

struct SourceSpec {
  std::filesystem::path path;
  YuvGeometry geometry;
};

struct ExternalCommands {
  /// Placeholders: {input} {output} {width} {height} {qp} {fps} {frames}
  /// {bitdepth} {profile}.
  std::string encoder;
  /// Placeholders: {input} (bitstream) {output} (raw YUV) {width} {height}
  /// {bitdepth}.
  std::string decoder;
  std::filesystem::path workDir;
  int gopLength = 16;
  bool keepFiles = false;
};

/// Runs an external encoder/decoder pair through shell command templates.
/// Downscales with Lanczos-3 before encoding and upscales the decoded
/// output back to the native size before measuring PSNR.
class ExternalBackend : public EncoderBackend {
 public:
  ExternalBackend(std::map<std::string, SourceSpec> sources, ExternalCommands commands);

  std::string tag() const override { return "external"; }
  std::string sourceKey(const std::string& sequenceId) const override;
  EncodeResult encode(const EncodeRequest& request) override;

 private:
  const SourceSpec& source(const std::string& id) const;

  std::map<std::string, SourceSpec> sources_;
  ExternalCommands cmd_;
  std::atomic<long> counter_{0};
  mutable std::mutex keyMutex_;
  mutable std::map<std::string, std::string> keyCache_;
};

std::string expand_template(std::string tmpl, const std::map<std::string, std::string>& values);

// ---- log store ---------------------------------------------------------------

struct EncodeKey {
  std::string sourceKey;
  int width = 0;
  int height = 0;
  int qp = 0;
  std::string profile;

  auto operator<=>(const EncodeKey&) const = default;
};

/// Append-only CSV of unique encode results, keyed by EncodeKey.
class EncodeLog {
 public:
  EncodeLog() = default;
  /// Loads existing rows when the file exists; appends go to the same file.
  explicit EncodeLog(std::filesystem::path path);

  std::optional<EncodeResult> find(const EncodeKey& key) const;
  /// Records results; rows already present are skipped.
  void append(const std::vector<std::pair<EncodeKey, EncodeResult>>& rows);
  std::size_t size() const;

  static const char* header();

 private:
  std::optional<std::filesystem::path> path_;
  mutable std::mutex mutex_;
  std::map<EncodeKey, EncodeResult> rows_;
};

// ---- adapter -------------------------------------------------------------------

struct AdapterOptions {
  unsigned workers = 1;
  std::optional<std::filesystem::path> logPath;
};

/// Caching front end over a backend: no (source, resolution, QP, profile) is
/// encoded twice, and every backend call is counted.
class EncodeAdapter {
 public:
  explicit EncodeAdapter(std::shared_ptr<EncoderBackend> backend, AdapterOptions options = {});

  EncodeResult encode_measure(const EncodeRequest& request);

  /// Runs requests (deduplicated, up to `workers` at once) and returns the
  /// results in request order.
  std::vector<EncodeResult> encode_batch(const std::vector<EncodeRequest>& requests);

  struct Sweep {
    std::vector<RQCurve> curves;
    int requested = 0;    // |resolutions| x |qps|
    int newEncodes = 0;   // backend invocations during this sweep
  };
  Sweep sweep(const std::string& sequenceId, const ResolutionSet& resolutions, const std::vector<int>& qps,
              const std::string& profile = "RA");

  long invocations() const { return invocations_.load(); }
  EncodeKey key(const EncodeRequest& request) const;
  EncoderBackend& backend() { return *backend_; }
  const EncodeLog& log() const { return log_; }

 private:
  std::shared_ptr<EncoderBackend> backend_;
  AdapterOptions options_;
  EncodeLog log_;
  std::atomic<long> invocations_{0};
  std::mutex batchMutex_;
};

}  // namespace ladder
