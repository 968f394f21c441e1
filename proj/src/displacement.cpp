#include "turbrest/displacement.hpp"

#include "turbrest/io_util.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <limits>

namespace turbrest {
namespace {

double diff(const ImageD& f, int y, int x, int dyy, int dxx) {
  const int rows = static_cast<int>(f.rows());
  const int cols = static_cast<int>(f.cols());
  const int xa = std::clamp(x - dxx, 0, cols - 1), xb = std::clamp(x + dxx, 0, cols - 1);
  const int ya = std::clamp(y - dyy, 0, rows - 1), yb = std::clamp(y + dyy, 0, rows - 1);
  const int span = (xb - xa) + (yb - ya);
  if (span == 0) return 0.0;
  return (f(yb, xb) - f(ya, xa)) / span;
}

double determinant_at(const DisplacementMap& m, int y, int x) {
  const double a = 1.0 + diff(m.dx, y, x, 0, 1);
  const double b = diff(m.dx, y, x, 1, 0);
  const double c = diff(m.dy, y, x, 0, 1);
  const double d = 1.0 + diff(m.dy, y, x, 1, 0);
  return a * d - b * c;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::string& in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

}  // namespace

ImageD jacobian_determinant(const DisplacementMap& map) {
  ImageD det(map.height(), map.width());
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) det(y, x) = determinant_at(map, y, x);
  }
  return det;
}

double min_jacobian(const DisplacementMap& map) {
  const int w = map.width(), h = map.height();
  if (w >= 3 && h >= 3) {
    double best = std::numeric_limits<double>::infinity();
    for (int y = 1; y < h - 1; ++y) {
      for (int x = 1; x < w - 1; ++x) best = std::min(best, determinant_at(map, y, x));
    }
    return best;
  }
  return jacobian_determinant(map).minCoeff();
}

std::string encode_displacements(const std::vector<DisplacementMap>& maps) {
  std::string out = "TDSP";
  const std::uint32_t w = maps.empty() ? 0 : maps.front().width();
  const std::uint32_t h = maps.empty() ? 0 : maps.front().height();
  put_u32(out, w);
  put_u32(out, h);
  put_u32(out, static_cast<std::uint32_t>(maps.size()));
  for (std::size_t n = 0; n < maps.size(); ++n) {
    const auto& m = maps[n];
    if (static_cast<std::uint32_t>(m.width()) != w || static_cast<std::uint32_t>(m.height()) != h) {
      throw DimensionError("displacement map " + std::to_string(n) + " has mismatched size");
    }
    for (int y = 0; y < m.height(); ++y) {
      for (int x = 0; x < m.width(); ++x) {
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(m.dx(y, x))));
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(m.dy(y, x))));
      }
    }
  }
  return out;
}

std::vector<DisplacementMap> decode_displacements(const std::string& bytes) {
  if (bytes.size() < 16 || bytes.compare(0, 4, "TDSP") != 0) throw FormatError("not a TDSP file");
  const std::uint32_t w = get_u32(bytes, 4), h = get_u32(bytes, 8), count = get_u32(bytes, 12);
  const std::uint64_t expected = 16 + std::uint64_t(w) * h * count * 8;
  if (bytes.size() != expected) {
    throw FormatError("TDSP size mismatch: expected " + std::to_string(expected) + " bytes, got " +
                      std::to_string(bytes.size()));
  }
  std::vector<DisplacementMap> maps;
  maps.reserve(count);
  std::size_t pos = 16;
  for (std::uint32_t n = 0; n < count; ++n) {
    auto m = DisplacementMap::zero(static_cast<int>(w), static_cast<int>(h));
    for (std::uint32_t y = 0; y < h; ++y) {
      for (std::uint32_t x = 0; x < w; ++x) {
        m.dx(y, x) = std::bit_cast<float>(get_u32(bytes, pos));
        m.dy(y, x) = std::bit_cast<float>(get_u32(bytes, pos + 4));
        pos += 8;
      }
    }
    maps.push_back(std::move(m));
  }
  return maps;
}

void save_displacements(const std::vector<DisplacementMap>& maps, const std::filesystem::path& path) {
  write_file_atomic(path, encode_displacements(maps));
}

std::vector<DisplacementMap> load_displacements(const std::filesystem::path& path) {
  return decode_displacements(read_file(path));
}

}  // namespace turbrest
