#include "ladderkit/encode.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "ladderkit/io.hpp"
#include "ladderkit/parallel.hpp"
#include "ladderkit/quality.hpp"
#include "ladderkit/resample.hpp"

namespace ladder {

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

std::string tail_of_file(const std::filesystem::path& p, std::size_t maxBytes = 4096) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  return s.size() > maxBytes ? s.substr(s.size() - maxBytes) : s;
}

std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += (c == '\'') ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

}  // namespace

// ---- synthetic -----------------------------------------------------------------

double ResolutionModel::rate(double qp) const { return std::exp2(log_rate(qp)); }

const ResolutionModel& SyntheticModel::at(const Resolution& r) const {
  const auto it = byLabel.find(r.label);
  if (it == byLabel.end()) throw LadderError("synthetic model has no resolution " + r.label);
  return it->second;
}

SyntheticBackend::SyntheticBackend(std::map<std::string, SyntheticModel> models, SyntheticNoise noise)
    : models_(std::move(models)), noise_(noise) {
  for (const auto& [id, m] : models_)
    for (const auto& [label, r] : m.byLabel)
      if (!(r.alpha < 0.0) || !(r.q1 > 0.0))
        throw LadderError("synthetic model " + id + "/" + label + ": need alpha < 0 and q1 > 0");
}

const SyntheticModel& SyntheticBackend::model(const std::string& sequenceId) const {
  const auto it = models_.find(sequenceId);
  if (it == models_.end()) throw LadderError("no synthetic model for sequence " + sequenceId);
  return it->second;
}

std::string SyntheticBackend::sourceKey(const std::string& sequenceId) const {
  const auto& m = model(sequenceId);
  std::string text = sequenceId;
  for (const auto& [label, r] : m.byLabel)
    text += "|" + label + ":" + format_double(r.alpha) + "," + format_double(r.beta) + "," + format_double(r.q0) + "," +
            format_double(r.q1);
  text += "|noise:" + format_double(noise_.psnrSigmaDb) + "," + format_double(noise_.rateSigmaRel) + "," +
          std::to_string(noise_.seed);
  return "syn-" + hex64(fnv1a(text.data(), text.size()));
}

EncodeResult SyntheticBackend::encode(const EncodeRequest& request) {
  const auto start = std::chrono::steady_clock::now();
  const ResolutionModel& rm = model(request.sequenceId).at(request.resolution);
  double rate = rm.rate(request.qp);
  double quality = rm.quality(request.qp);
  if (noise_.psnrSigmaDb > 0.0 || noise_.rateSigmaRel > 0.0) {
    const std::string text = request.sequenceId + "|" + std::to_string(request.resolution.width) + "x" +
                             std::to_string(request.resolution.height) + "|" + std::to_string(request.qp) + "|" +
                             request.codecProfile;
    std::mt19937_64 rng(fnv1a(text.data(), text.size(), noise_.seed ^ 1469598103934665603ULL));
    std::normal_distribution<double> n01(0.0, 1.0);
    const double zq = n01(rng);
    const double zr = n01(rng);
    quality += noise_.psnrSigmaDb * zq;
    rate *= std::exp(noise_.rateSigmaRel * zr);
  }
  EncodeResult r;
  r.request = request;
  r.bitrateKbps = rate;
  r.psnrDb = std::min(quality, kPsnrCapDb);
  r.backendTag = tag();
  r.wallTimeSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

// ---- external --------------------------------------------------------------------

std::string expand_template(std::string tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size();) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i);
      if (close != std::string::npos) {
        const auto it = values.find(tmpl.substr(i + 1, close - i - 1));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

ExternalBackend::ExternalBackend(std::map<std::string, SourceSpec> sources, ExternalCommands commands)
    : sources_(std::move(sources)), cmd_(std::move(commands)) {
  if (cmd_.encoder.empty() || cmd_.decoder.empty()) throw LadderError("external backend needs encoder and decoder commands");
  if (cmd_.workDir.empty()) cmd_.workDir = std::filesystem::temp_directory_path() / "ladderkit-work";
  std::filesystem::create_directories(cmd_.workDir);
}

const SourceSpec& ExternalBackend::source(const std::string& id) const {
  const auto it = sources_.find(id);
  if (it == sources_.end()) throw LadderError("no source registered for sequence " + id);
  return it->second;
}

std::string ExternalBackend::sourceKey(const std::string& sequenceId) const {
  std::lock_guard lock(keyMutex_);
  auto it = keyCache_.find(sequenceId);
  if (it != keyCache_.end()) return it->second;
  const auto& src = source(sequenceId);
  std::string key = "file-" + hex64(file_digest(src.path)) + "-f" + std::to_string(src.geometry.frames);
  keyCache_[sequenceId] = key;
  return key;
}

EncodeResult ExternalBackend::encode(const EncodeRequest& request) {
  const auto start = std::chrono::steady_clock::now();
  const SourceSpec& spec = source(request.sequenceId);
  const YuvFileSequence native(spec.path, spec.geometry);
  const int w = request.resolution.width, h = request.resolution.height;

  std::string stem;
  for (char c : request.sequenceId) stem += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  stem += "_" + std::to_string(w) + "x" + std::to_string(h) + "_qp" + std::to_string(request.qp) + "_" +
          std::to_string(counter_++);
  const auto input = cmd_.workDir / (stem + "_in.yuv");
  const auto bitstream = cmd_.workDir / (stem + ".bin");
  const auto decoded = cmd_.workDir / (stem + "_dec.yuv");
  const auto logFile = cmd_.workDir / (stem + ".log");
  auto cleanup = [&] {
    if (cmd_.keepFiles) return;
    std::error_code ec;
    for (const auto& p : {input, bitstream, decoded, logFile}) std::filesystem::remove(p, ec);
  };

  std::vector<Frame> scaled;
  for (int i = 0; i < native.frameCount(); ++i) scaled.push_back(lanczos3_resample(native.frame(i), w, h));
  write_yuv(input, scaled);

  std::map<std::string, std::string> vars{{"width", std::to_string(w)},
                                          {"height", std::to_string(h)},
                                          {"qp", std::to_string(request.qp)},
                                          {"fps", format_double(native.fps())},
                                          {"frames", std::to_string(native.frameCount())},
                                          {"bitdepth", std::to_string(native.bitDepth())},
                                          {"profile", request.codecProfile}};
  auto run = [&](const std::string& tmpl, const std::filesystem::path& in, const std::filesystem::path& out,
                 const char* what) {
    auto v = vars;
    v["input"] = shell_quote(in.string());
    v["output"] = shell_quote(out.string());
    const std::string command = "{ " + expand_template(tmpl, v) + "; } >> " + shell_quote(logFile.string()) + " 2>&1";
    const int rc = std::system(command.c_str());
    if (rc != 0) {
      std::string diag = "command: " + command + "\nexit status: " + std::to_string(rc) + "\n" + tail_of_file(logFile);
      cleanup();
      throw EncodeError(std::string(what) + " failed for " + request.sequenceId + " at " + std::to_string(w) + "x" +
                            std::to_string(h) + " QP " + std::to_string(request.qp),
                        diag);
    }
  };

  run(cmd_.encoder, input, bitstream, "encoder");
  std::error_code ec;
  const auto bytes = std::filesystem::file_size(bitstream, ec);
  if (ec || bytes == 0) {
    const std::string diag = tail_of_file(logFile);
    cleanup();
    throw EncodeError("encoder produced no bitstream for " + request.sequenceId, diag);
  }
  run(cmd_.decoder, bitstream, decoded, "decoder");

  YuvGeometry decGeo{w, h, native.bitDepth(), native.fps(), 0};
  std::vector<Frame> restored;
  try {
    const YuvFileSequence dec(decoded, decGeo);
    if (dec.frameCount() != native.frameCount())
      throw LadderError("decoded " + std::to_string(dec.frameCount()) + " frames, expected " +
                        std::to_string(native.frameCount()));
    for (int i = 0; i < dec.frameCount(); ++i)
      restored.push_back(lanczos3_resample(dec.frame(i), native.width(), native.height()));
  } catch (const LadderError& e) {
    const std::string diag = tail_of_file(logFile);
    cleanup();
    throw EncodeError(std::string("malformed decoder output: ") + e.what(), diag);
  }
  const InMemorySequence restoredSeq(std::move(restored), native.fps());
  const PsnrReport q = psnr(native, restoredSeq, cmd_.gopLength);
  cleanup();

  EncodeResult r;
  r.request = request;
  r.bitrateKbps = static_cast<double>(bytes) * 8.0 * native.fps() / native.frameCount() / 1000.0;
  r.psnrDb = q.meanDb;
  r.gopPsnrDb = q.gopDb;
  r.backendTag = tag();
  r.wallTimeSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

// ---- log -------------------------------------------------------------------------

const char* EncodeLog::header() {
  return "sequence_id,width,height,qp,bitrate_kbps,psnr_db,backend,wall_time_s,source_key,profile";
}

EncodeLog::EncodeLog(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(*path_) || std::filesystem::file_size(*path_) == 0) return;
  const CsvTable t = read_csv(*path_);
  const auto cId = t.column("sequence_id"), cW = t.column("width"), cH = t.column("height"), cQp = t.column("qp"),
             cR = t.column("bitrate_kbps"), cQ = t.column("psnr_db"), cB = t.column("backend"),
             cT = t.column("wall_time_s"), cK = t.column("source_key"), cP = t.column("profile");
  for (const auto& row : t.rows) {
    EncodeResult r;
    r.request.sequenceId = row[cId];
    r.request.resolution = {parse_int(row[cW]), parse_int(row[cH]), ""};
    r.request.qp = parse_int(row[cQp]);
    r.request.codecProfile = row[cP];
    r.bitrateKbps = parse_double(row[cR]);
    r.psnrDb = parse_double(row[cQ]);
    r.backendTag = row[cB];
    r.wallTimeSeconds = parse_double(row[cT]);
    rows_[{row[cK], r.request.resolution.width, r.request.resolution.height, r.request.qp, r.request.codecProfile}] = r;
  }
}

std::optional<EncodeResult> EncodeLog::find(const EncodeKey& key) const {
  std::lock_guard lock(mutex_);
  const auto it = rows_.find(key);
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

std::size_t EncodeLog::size() const {
  std::lock_guard lock(mutex_);
  return rows_.size();
}

void EncodeLog::append(const std::vector<std::pair<EncodeKey, EncodeResult>>& rows) {
  std::lock_guard lock(mutex_);
  std::ostringstream os;
  for (const auto& [key, r] : rows) {
    if (!rows_.emplace(key, r).second) continue;
    os << r.request.sequenceId << ',' << key.width << ',' << key.height << ',' << key.qp << ','
       << format_double(r.bitrateKbps) << ',' << format_double(r.psnrDb) << ',' << r.backendTag << ','
       << format_double(r.wallTimeSeconds) << ',' << key.sourceKey << ',' << key.profile << '\n';
  }
  if (!path_ || os.str().empty()) return;
  const bool fresh = !std::filesystem::exists(*path_) || std::filesystem::file_size(*path_) == 0;
  if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
  std::ofstream out(*path_, std::ios::app | std::ios::binary);
  if (!out) throw LadderError("cannot append to encode log " + path_->string());
  if (fresh) out << header() << '\n';
  out << os.str();
}

// ---- adapter -----------------------------------------------------------------------

namespace {
EncodeLog open_log(const AdapterOptions& options) {
  if (options.logPath) return EncodeLog(*options.logPath);
  return EncodeLog();
}
}  // namespace

EncodeAdapter::EncodeAdapter(std::shared_ptr<EncoderBackend> backend, AdapterOptions options)
    : backend_(std::move(backend)), options_(std::move(options)), log_(open_log(options_)) {
  if (!backend_) throw LadderError("adapter needs a backend");
}

EncodeKey EncodeAdapter::key(const EncodeRequest& request) const {
  return {backend_->sourceKey(request.sequenceId), request.resolution.width, request.resolution.height, request.qp,
          request.codecProfile};
}

EncodeResult EncodeAdapter::encode_measure(const EncodeRequest& request) { return encode_batch({request}).front(); }

std::vector<EncodeResult> EncodeAdapter::encode_batch(const std::vector<EncodeRequest>& requests) {
  std::lock_guard batchLock(batchMutex_);
  std::vector<EncodeKey> keys;
  for (const auto& r : requests) keys.push_back(key(r));

  std::vector<std::size_t> todo;  // first occurrence of each uncached key
  std::set<EncodeKey> scheduled;
  for (std::size_t i = 0; i < requests.size(); ++i)
    if (!log_.find(keys[i]) && scheduled.insert(keys[i]).second) todo.push_back(i);

  std::vector<std::optional<EncodeResult>> fresh(todo.size());
  std::exception_ptr failure;
  try {
    parallel_for(todo.size(), options_.workers, [&](std::size_t k) {
      ++invocations_;
      fresh[k] = backend_->encode(requests[todo[k]]);
    });
  } catch (...) {
    failure = std::current_exception();
  }

  std::vector<std::pair<EncodeKey, EncodeResult>> rows;
  for (std::size_t k = 0; k < todo.size(); ++k)
    if (fresh[k]) rows.emplace_back(keys[todo[k]], *fresh[k]);
  log_.append(rows);  // partial results persist
  if (failure) std::rethrow_exception(failure);

  std::vector<EncodeResult> out;
  out.reserve(requests.size());
  std::set<EncodeKey> freshKeys;
  for (const auto& row : rows) freshKeys.insert(row.first);
  for (std::size_t i = 0; i < requests.size(); ++i) {
    EncodeResult r = *log_.find(keys[i]);
    r.request = requests[i];
    const bool isFresh = freshKeys.erase(keys[i]) > 0;
    if (!isFresh) {
      r.cached = true;
      r.wallTimeSeconds = 0.0;
    }
    out.push_back(std::move(r));
  }
  return out;
}

EncodeAdapter::Sweep EncodeAdapter::sweep(const std::string& sequenceId, const ResolutionSet& resolutions,
                                          const std::vector<int>& qps, const std::string& profile) {
  std::vector<EncodeRequest> requests;
  for (const auto& res : resolutions)
    for (int qp : qps) requests.push_back({sequenceId, res, qp, profile});
  const long before = invocations();
  const auto results = encode_batch(requests);
  Sweep s;
  s.requested = static_cast<int>(requests.size());
  s.newEncodes = static_cast<int>(invocations() - before);
  std::size_t k = 0;
  for (const auto& res : resolutions) {
    RQCurve c;
    c.resolution = res;
    for (std::size_t j = 0; j < qps.size(); ++j) c.points.push_back(results[k++].point());
    s.curves.push_back(std::move(c));
  }
  return s;
}

}  // namespace ladder
