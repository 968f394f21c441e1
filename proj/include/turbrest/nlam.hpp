#pragma once

#include "turbrest/config.hpp"
#include "turbrest/image.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace turbrest {

/// One bar group of the chart: columns [col_begin, col_end) holding `cycles`
/// periods of the pattern.
struct Zone {
  int index = 0;  // label from the layout
  int col_begin = 0;
  int col_end = 0;
  double cycles = 1.0;

  int width() const { return col_end - col_begin; }
  double frequency() const { return cycles / width(); }  // cycles per pixel
};

/// Inclusive row band inside which the measurement lines are placed.
struct RowBand {
  int first = 0;
  int last = 0;
};

struct ZonePartition {
  std::vector<Zone> zones;  // increasing frequency
  RowBand rows;
  std::vector<int> line_rows;

  int lines() const { return static_cast<int>(line_rows.size()); }
};

/// Validates the layout against the image and spreads `lines` rows evenly over
/// the band (both ends included for lines >= 2, the middle row for 1).
ZonePartition build_partition(int width, int height, std::vector<Zone> zones, RowBand rows, int lines);

// Reads rows / lines / "zone k: c_start c_end cycles" entries from [nlam].
ZonePartition partition_from_config(const Config& config, int width, int height);

using LineSignal = Eigen::ArrayXd;

/// Samples of line `line` restricted to the columns of zone `zone` (both are
/// positions in the partition).
template <typename Scalar>
LineSignal extract_signal(const BasicFrame<Scalar>& frame, const ZonePartition& part, int line, int zone) {
  if (line < 0 || line >= part.lines()) throw Error("line index " + std::to_string(line) + " out of range");
  if (zone < 0 || zone >= static_cast<int>(part.zones.size())) {
    throw Error("zone index " + std::to_string(zone) + " out of range");
  }
  const Zone& z = part.zones[static_cast<std::size_t>(zone)];
  const int row = part.line_rows[static_cast<std::size_t>(line)];
  if (z.col_end > frame.width() || row >= frame.height()) {
    throw DimensionError("partition does not fit the " + std::to_string(frame.width()) + "x" +
                         std::to_string(frame.height()) + " frame");
  }
  return frame.pixels().row(row).segment(z.col_begin, z.width())
      .template cast<double>()
      .transpose();
}

struct NlamPoint {
  int zone = 0;
  double frequency = 0.0;
  double delta_s = 0.0;
};

struct NlamCurve {
  std::vector<NlamPoint> points;
  std::string source;
};

/// Average over the measurement lines of (max - min) of every zone signal.
template <typename Scalar>
NlamCurve nlam_curve(const BasicFrame<Scalar>& frame, const ZonePartition& part, std::string source = {}) {
  NlamCurve curve;
  curve.source = std::move(source);
  for (int k = 0; k < static_cast<int>(part.zones.size()); ++k) {
    double sum = 0.0;
    for (int j = 0; j < part.lines(); ++j) {
      const LineSignal s = extract_signal(frame, part, j, k);
      sum += s.maxCoeff() - s.minCoeff();
    }
    const Zone& z = part.zones[static_cast<std::size_t>(k)];
    curve.points.push_back({z.index, z.frequency(), sum / part.lines()});
  }
  return curve;
}

/// Pointwise mean of curves measured on the same zone set.
NlamCurve average_nlam(std::span<const NlamCurve> curves);

/// Divides every gain by the lowest-frequency gain.
NlamCurve normalize_curve(const NlamCurve& curve);

// "zone,frequency_cpp,delta_s"; with a leading "frame" column when
// `with_frame` is set (frame = curve position in the list).
std::string curves_csv(std::span<const NlamCurve> curves, bool with_frame);

}  // namespace turbrest
