#include "turbrest/nlam.hpp"

#include "turbrest/io_util.hpp"

#include <algorithm>
#include <sstream>

namespace turbrest {

ZonePartition build_partition(int width, int height, std::vector<Zone> zones, RowBand rows, int lines) {
  if (lines < 1) throw Error("line count must be >= 1");
  if (zones.empty()) throw Error("partition needs at least one zone");
  if (rows.first < 0 || rows.last < rows.first || rows.last >= height) {
    throw Error("row band [" + std::to_string(rows.first) + ", " + std::to_string(rows.last) +
                "] outside image height " + std::to_string(height));
  }
  for (const auto& z : zones) {
    if (z.col_begin < 0 || z.col_end <= z.col_begin || z.col_end > width) {
      throw Error("zone " + std::to_string(z.index) + " columns [" + std::to_string(z.col_begin) + ", " +
                  std::to_string(z.col_end) + ") outside image width " + std::to_string(width));
    }
    if (!(z.cycles > 0.0)) throw Error("zone " + std::to_string(z.index) + " must have cycles > 0");
  }
  for (std::size_t a = 0; a < zones.size(); ++a) {
    for (std::size_t b = a + 1; b < zones.size(); ++b) {
      if (zones[a].col_begin < zones[b].col_end && zones[b].col_begin < zones[a].col_end) {
        throw Error("zones " + std::to_string(zones[a].index) + " and " + std::to_string(zones[b].index) +
                    " overlap");
      }
    }
  }
  for (std::size_t k = 1; k < zones.size(); ++k) {
    if (zones[k].frequency() < zones[k - 1].frequency()) {
      throw Error("zones must be listed by increasing frequency (zone " + std::to_string(zones[k].index) + ")");
    }
  }

  ZonePartition part{std::move(zones), rows, {}};
  if (lines == 1) {
    part.line_rows.push_back((rows.first + rows.last) / 2);
  } else {
    const long span = rows.last - rows.first;
    for (long j = 0; j < lines; ++j) {
      // round(first + j * span / (lines - 1)), in integers
      part.line_rows.push_back(
          rows.first + static_cast<int>((2 * j * span + (lines - 1)) / (2 * static_cast<long>(lines - 1))));
    }
  }
  return part;
}

ZonePartition partition_from_config(const Config& config, int width, int height) {
  const auto* entries = config.section("nlam");
  if (!entries) throw ConfigError(config.origin() + ": missing [nlam] section");
  std::vector<Zone> zones;
  RowBand band{-1, -1};
  long long lines = -1;
  for (const auto& e : *entries) {
    std::istringstream v(e.value);
    const std::string where = config.origin() + ":" + std::to_string(e.line) + ": ";
    if (e.key == "rows") {
      if (!(v >> band.first >> band.last)) throw ConfigError(where + "rows expects 'first last'");
    } else if (e.key == "lines") {
      if (!(v >> lines)) throw ConfigError(where + "lines expects an integer");
    } else if (e.key.rfind("zone", 0) == 0) {
      Zone z;
      std::istringstream k(e.key.substr(4));
      if (!(k >> z.index)) throw ConfigError(where + "zone entries look like 'zone k: c_start c_end cycles'");
      if (!(v >> z.col_begin >> z.col_end >> z.cycles)) {
        throw ConfigError(where + "zone " + std::to_string(z.index) + " expects 'c_start c_end cycles'");
      }
      zones.push_back(z);
    } else {
      throw ConfigError(where + "unknown [nlam] key '" + e.key + "'");
    }
  }
  if (band.first < 0) throw ConfigError(config.origin() + ": [nlam] rows not set");
  if (lines < 1) throw ConfigError(config.origin() + ": [nlam] lines not set");
  try {
    return build_partition(width, height, std::move(zones), band, static_cast<int>(lines));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(config.origin() + ": " + e.what());
  }
}

NlamCurve average_nlam(std::span<const NlamCurve> curves) {
  if (curves.empty()) throw Error("average_nlam: no curves");
  NlamCurve out;
  out.source = "average";
  out.points = curves.front().points;
  for (auto& p : out.points) p.delta_s = 0.0;
  for (const auto& c : curves) {
    if (c.points.size() != out.points.size()) throw Error("average_nlam: curves have different zone sets");
    for (std::size_t k = 0; k < c.points.size(); ++k) {
      if (c.points[k].zone != out.points[k].zone || c.points[k].frequency != out.points[k].frequency) {
        throw Error("average_nlam: curves have different zone sets");
      }
      out.points[k].delta_s += c.points[k].delta_s;
    }
  }
  for (auto& p : out.points) p.delta_s /= static_cast<double>(curves.size());
  return out;
}

NlamCurve normalize_curve(const NlamCurve& curve) {
  if (curve.points.empty()) throw Error("normalize_curve: empty curve");
  const double base = curve.points.front().delta_s;
  if (!(base > 0.0)) throw Error("normalize_curve: lowest-frequency gain is zero");
  NlamCurve out = curve;
  for (auto& p : out.points) p.delta_s /= base;
  return out;
}

std::string curves_csv(std::span<const NlamCurve> curves, bool with_frame) {
  std::string out = with_frame ? "frame,zone,frequency_cpp,delta_s\n" : "zone,frequency_cpp,delta_s\n";
  for (std::size_t f = 0; f < curves.size(); ++f) {
    for (const auto& p : curves[f].points) {
      if (with_frame) out += std::to_string(f) + ",";
      out += std::to_string(p.zone) + "," + format_number(p.frequency) + "," + format_number(p.delta_s) + "\n";
    }
  }
  return out;
}

}  // namespace turbrest
