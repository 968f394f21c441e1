#include "turbrest/pgm.hpp"

#include "turbrest/io_util.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>

namespace turbrest {
namespace {

class HeaderReader {
 public:
  HeaderReader(const std::string& bytes, const std::string& origin) : bytes_(bytes), origin_(origin) {}

  void skip_separators() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  long read_uint(const char* what) {
    skip_separators();
    const std::size_t start = pos_;
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > std::numeric_limits<int>::max()) fail(std::string(what) + " too large");
      ++pos_;
    }
    if (pos_ == start) fail(std::string("expected ") + what);
    return value;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw FormatError(origin_ + ": " + msg);
  }

  std::size_t pos_ = 0;

 private:
  const std::string& bytes_;
  const std::string& origin_;
};

}  // namespace

Frame decode_pgm(const std::string& bytes, const std::string& origin) {
  HeaderReader reader(bytes, origin);
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') reader.fail("not a binary PGM (P5)");
  reader.pos_ = 2;
  const long width = reader.read_uint("width");
  const long height = reader.read_uint("height");
  const long maxval = reader.read_uint("maxval");
  if (width < 1 || height < 1) reader.fail("image dimensions must be positive");
  if (maxval < 1 || maxval > 65535) reader.fail("maxval must be in [1, 65535]");
  // Exactly one whitespace byte separates the header from the raster.
  if (reader.pos_ >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[reader.pos_]))) {
    reader.fail("missing whitespace after maxval");
  }
  ++reader.pos_;

  const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() - reader.pos_ < count * sample_bytes) reader.fail("truncated raster");

  ImageD pixels(height, width);
  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data() + reader.pos_);
  for (std::size_t i = 0; i < count; ++i) {
    unsigned v = sample_bytes == 2 ? (unsigned(raw[2 * i]) << 8) | raw[2 * i + 1] : raw[i];
    if (v > static_cast<unsigned>(maxval)) reader.fail("sample exceeds maxval at index " + std::to_string(i));
    pixels.data()[i] = static_cast<double>(v);
  }
  return Frame(std::move(pixels), static_cast<int>(maxval));
}

Frame load_frame(const std::filesystem::path& path) {
  return decode_pgm(read_file(path), path.string());
}

std::string encode_pgm(const Frame& frame) {
  std::string out = "P5\n" + std::to_string(frame.width()) + " " + std::to_string(frame.height()) +
                    "\n" + std::to_string(frame.max_value()) + "\n";
  const bool wide = frame.max_value() > 255;
  const double ceiling = frame.max_value();
  const auto& px = frame.pixels();
  out.reserve(out.size() + static_cast<std::size_t>(px.size()) * (wide ? 2 : 1));
  for (Eigen::Index i = 0; i < px.size(); ++i) {
    const double q = std::clamp(std::floor(px.data()[i] + 0.5), 0.0, ceiling);
    const auto v = static_cast<std::uint16_t>(q);
    if (wide) out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v & 0xff));
  }
  return out;
}

void save_frame(const Frame& frame, const std::filesystem::path& path) {
  write_file_atomic(path, encode_pgm(frame));
}

Sequence load_sequence(const std::vector<std::filesystem::path>& paths) {
  if (paths.empty()) throw IoError("no input frames");
  std::vector<Frame> frames;
  frames.reserve(paths.size());
  for (const auto& p : paths) frames.push_back(load_frame(p));
  return Sequence(std::move(frames));
}

std::vector<std::filesystem::path> expand_pattern(const std::string& pattern) {
  namespace fs = std::filesystem;
  const fs::path full(pattern);
  const std::string name = full.filename().string();
  if (name.find_first_of("*?[") == std::string::npos) {
    if (!fs::exists(full)) throw IoError("no such file: " + pattern);
    return {full};
  }
  const fs::path dir = full.has_parent_path() ? full.parent_path() : fs::path(".");
  std::error_code ec;
  std::vector<fs::path> matches;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    const std::string candidate = entry.path().filename().string();
    if (::fnmatch(name.c_str(), candidate.c_str(), FNM_PERIOD) == 0) {
      matches.push_back(full.has_parent_path() ? dir / candidate : fs::path(candidate));
    }
  }
  if (ec) throw IoError("cannot list directory " + dir.string() + ": " + ec.message());
  std::sort(matches.begin(), matches.end(),
            [](const fs::path& a, const fs::path& b) { return a.string() < b.string(); });
  if (matches.empty()) throw IoError("pattern matched no files: " + pattern);
  return matches;
}

}  // namespace turbrest
