#include "ladderkit/frame.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace ladder {

namespace {

int chroma_dim(int d) { return (d + 1) / 2; }

int bytes_per_sample(int bitDepth) { return bitDepth > 8 ? 2 : 1; }

void read_plane(std::istream& in, SamplePlane& plane, int bitDepth) {
  const auto n = static_cast<std::size_t>(plane.size());
  if (bitDepth > 8) {
    std::vector<unsigned char> buf(n * 2);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    for (std::size_t i = 0; i < n; ++i)
      plane.data()[i] = static_cast<std::uint16_t>(buf[2 * i] | (buf[2 * i + 1] << 8));
  } else {
    std::vector<unsigned char> buf(n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    for (std::size_t i = 0; i < n; ++i) plane.data()[i] = buf[i];
  }
  if (!in) throw LadderError("truncated frame data");
  const std::uint16_t maxv = static_cast<std::uint16_t>((1 << bitDepth) - 1);
  for (std::size_t i = 0; i < n; ++i)
    if (plane.data()[i] > maxv) throw LadderError("sample exceeds bit depth");
}

void write_plane(std::ostream& out, const SamplePlane& plane, int bitDepth) {
  const auto n = static_cast<std::size_t>(plane.size());
  if (bitDepth > 8) {
    std::vector<unsigned char> buf(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
      buf[2 * i] = static_cast<unsigned char>(plane.data()[i] & 0xff);
      buf[2 * i + 1] = static_cast<unsigned char>(plane.data()[i] >> 8);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  } else {
    std::vector<unsigned char> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = static_cast<unsigned char>(plane.data()[i]);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  }
}

double parse_y4m_rate(const std::string& token) {
  const auto colon = token.find(':');
  if (colon == std::string::npos) return std::stod(token);
  const double num = std::stod(token.substr(0, colon));
  const double den = std::stod(token.substr(colon + 1));
  return den > 0 ? num / den : 0.0;
}

}  // namespace

Frame Frame::filled(int width, int height, int bitDepth, std::uint16_t luma) {
  Frame f;
  f.bitDepth = bitDepth;
  f.y = SamplePlane::Constant(height, width, luma);
  const auto mid = static_cast<std::uint16_t>(1 << (bitDepth - 1));
  f.u = SamplePlane::Constant(chroma_dim(height), chroma_dim(width), mid);
  f.v = f.u;
  return f;
}

Frame Frame::from_luma(SamplePlane luma, int bitDepth) {
  Frame f = filled(static_cast<int>(luma.cols()), static_cast<int>(luma.rows()), bitDepth, 0);
  f.y = std::move(luma);
  return f;
}

InMemorySequence::InMemorySequence(std::vector<Frame> frames, double fps)
    : frames_(std::move(frames)), fps_(fps) {
  if (frames_.empty()) throw LadderError("sequence has no frames");
  for (const auto& f : frames_)
    if (f.width() != frames_.front().width() || f.height() != frames_.front().height() ||
        f.bitDepth != frames_.front().bitDepth)
      throw LadderError("frames differ in geometry");
}

Frame InMemorySequence::frame(int index) const {
  if (index < 0 || index >= frameCount()) throw LadderError("frame index out of range");
  return frames_[static_cast<std::size_t>(index)];
}

std::uint64_t frame_payload_bytes(int width, int height, int bitDepth) {
  const std::uint64_t luma = static_cast<std::uint64_t>(width) * height;
  const std::uint64_t chroma = static_cast<std::uint64_t>(chroma_dim(width)) * chroma_dim(height);
  return (luma + 2 * chroma) * bytes_per_sample(bitDepth);
}

YuvFileSequence::YuvFileSequence(std::filesystem::path path, YuvGeometry geometry)
    : path_(std::move(path)), geo_(geometry) {
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw LadderError("cannot open " + path_.string());
  std::string magic(9, '\0');
  in.read(magic.data(), 9);
  if (in && magic == "YUV4MPEG2") {
    y4m_ = true;
    std::string header;
    std::getline(in, header);
    std::istringstream tokens(header);
    std::string tok;
    while (tokens >> tok) try {
      switch (tok[0]) {
        case 'W': geo_.width = std::stoi(tok.substr(1)); break;
        case 'H': geo_.height = std::stoi(tok.substr(1)); break;
        case 'F': geo_.fps = parse_y4m_rate(tok.substr(1)); break;
        case 'C': {
          const std::string cs = tok.substr(1);
          if (cs.rfind("420", 0) != 0) throw LadderError("only 4:2:0 Y4M supported: " + cs);
          // 420, 420jpeg, 420mpeg2, 420paldv are 8-bit; 420p10 and friends carry a depth.
          const std::string depth = cs.rfind("420p", 0) == 0 ? cs.substr(4) : "";
          const bool digits = !depth.empty() && std::all_of(depth.begin(), depth.end(), [](unsigned char ch) { return std::isdigit(ch); });
          geo_.bitDepth = digits ? std::stoi(depth) : 8;
          break;
        }
        default: break;
      }
    } catch (const std::logic_error&) {
      throw LadderError(path_.string() + ": bad Y4M header token '" + tok + "'");
    }
    headerBytes_ = 9 + header.size() + 1;
    frameHeaderBytes_ = 6;  // "FRAME\n"; frame parameters are not supported
  }
  if (geo_.width <= 0 || geo_.height <= 0) throw LadderError("invalid geometry for " + path_.string());
  if (geo_.bitDepth < 8 || geo_.bitDepth > 16) throw LadderError("unsupported bit depth");

  const auto size = std::filesystem::file_size(path_);
  const auto available = size > headerBytes_ ? (size - headerBytes_) / frameBytes() : 0;
  frameCount_ = static_cast<int>(available);
  if (geo_.frames > 0) {
    if (geo_.frames > frameCount_)
      throw LadderError(path_.string() + ": file holds " + std::to_string(frameCount_) + " frames, " +
                        std::to_string(geo_.frames) + " requested");
    frameCount_ = geo_.frames;
  }
  if (frameCount_ == 0) throw LadderError(path_.string() + ": no complete frames");
}

std::uint64_t YuvFileSequence::frameBytes() const {
  return frameHeaderBytes_ + frame_payload_bytes(geo_.width, geo_.height, geo_.bitDepth);
}

Frame YuvFileSequence::frame(int index) const {
  if (index < 0 || index >= frameCount_) throw LadderError("frame index out of range");
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw LadderError("cannot open " + path_.string());
  in.seekg(static_cast<std::streamoff>(headerBytes_ + frameBytes() * static_cast<std::uint64_t>(index)));
  if (y4m_) {
    char tag[6];
    in.read(tag, 6);
    if (!in || std::string(tag, 5) != "FRAME") throw LadderError("bad Y4M frame marker");
  }
  Frame f;
  f.bitDepth = geo_.bitDepth;
  f.y.resize(geo_.height, geo_.width);
  f.u.resize(chroma_dim(geo_.height), chroma_dim(geo_.width));
  f.v.resize(chroma_dim(geo_.height), chroma_dim(geo_.width));
  read_plane(in, f.y, f.bitDepth);
  read_plane(in, f.u, f.bitDepth);
  read_plane(in, f.v, f.bitDepth);
  return f;
}

void write_yuv(const std::filesystem::path& path, const std::vector<Frame>& frames) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LadderError("cannot write " + path.string());
  for (const auto& f : frames) {
    Frame g = f;
    if (!g.hasChroma()) g = Frame::from_luma(f.y, f.bitDepth);
    write_plane(out, g.y, g.bitDepth);
    write_plane(out, g.u, g.bitDepth);
    write_plane(out, g.v, g.bitDepth);
  }
  if (!out) throw LadderError("write failed: " + path.string());
}

void write_yuv(const std::filesystem::path& path, const FrameSource& source) {
  std::vector<Frame> frames;
  for (int i = 0; i < source.frameCount(); ++i) frames.push_back(source.frame(i));
  write_yuv(path, frames);
}

InMemorySequence load_all(const FrameSource& source) {
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(source.frameCount()));
  for (int i = 0; i < source.frameCount(); ++i) frames.push_back(source.frame(i));
  return InMemorySequence(std::move(frames), source.fps());
}

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed) {
  std::uint64_t h = seed;
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LadderError("cannot open " + path.string());
  std::uint64_t h = 1469598103934665603ULL;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h = fnv1a(buf.data(), static_cast<std::size_t>(in.gcount()), h);
  }
  return h;
}

}  // namespace ladder
