#pragma once

// Synthetic scenes and independent reference computations shared by the unit
// and acceptance suites. The NLAM and barchart oracles use plain loops and erf
// rather than the library code they are compared against.

#include "turbrest/diffeo_warp.hpp"
#include "turbrest/displacement.hpp"
#include "turbrest/gaussian.hpp"
#include "turbrest/image.hpp"
#include "turbrest/interpolate.hpp"
#include "turbrest/nlam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace fixtures {

using turbrest::DisplacementMap;
using turbrest::Frame;
using turbrest::ImageD;

inline Frame from_function(int w, int h, int max_value, auto&& f) {
  ImageD p(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) p(y, x) = f(x, y);
  }
  return Frame::clamped(std::move(p), max_value);
}

// Smooth, well-conditioned registration target (period ~18 px).
inline Frame smooth_pattern(int w, int h) {
  return from_function(w, h, 255, [](int x, int y) {
    return 128.0 + 100.0 * std::sin(0.35 * x) * std::cos(0.28 * y + 0.5);
  });
}

// Multi-scale random texture (Gaussian-smoothed white noise at widths 1.5, 3
// and 6 px) around mid-gray.
inline Frame textured_scene(int w, int h, std::uint64_t seed = 123) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  ImageD acc = ImageD::Zero(h, w);
  const double scales[] = {1.5, 3.0, 6.0};
  const double amps[] = {25.0, 20.0, 15.0};
  const int pad = 20;
  for (int i = 0; i < 3; ++i) {
    ImageD noise(h + 2 * pad, w + 2 * pad);
    for (Eigen::Index k = 0; k < noise.size(); ++k) noise.data()[k] = normal(rng);
    ImageD sm = turbrest::gaussian_blur(noise, scales[i]).block(pad, pad, h, w);
    sm /= std::sqrt(sm.square().mean());
    acc += amps[i] * sm;
  }
  return Frame::clamped(acc + 128.0, 255);
}

// Vertical step edge at column `edge`: `low` on the left, `high` from `edge` on.
inline Frame step_edge(int w, int h, int edge, double low, double high) {
  return from_function(w, h, 255, [=](int x, int) { return x < edge ? low : high; });
}

// 10%-90% rise distance of a left-to-right rising edge, averaged over the rows
// in [row_begin, row_end). Crossings are linearly interpolated between samples.
inline double edge_rise_distance(const Frame& f, double low, double high, int row_begin, int row_end) {
  const double l10 = low + 0.1 * (high - low);
  const double l90 = low + 0.9 * (high - low);
  auto crossing = [&](int y, double level) {
    for (int x = 1; x < f.width(); ++x) {
      const double a = f(x - 1, y), b = f(x, y);
      if (a < level && b >= level) return (x - 1) + (level - a) / (b - a);
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  double sum = 0.0;
  for (int y = row_begin; y < row_end; ++y) sum += crossing(y, l90) - crossing(y, l10);
  return sum / (row_end - row_begin);
}

// Inverse displacement u of the map x -> x + d(x), i.e. u(x) = -d(x + u(x)),
// solved by fixed-point iteration.
inline DisplacementMap inverse_displacement(const DisplacementMap& d, int iterations = 30) {
  auto u = DisplacementMap::zero(d.width(), d.height());
  for (int y = 0; y < d.height(); ++y) {
    for (int x = 0; x < d.width(); ++x) {
      double ux = -d.dx(y, x), uy = -d.dy(y, x);
      for (int it = 0; it < iterations; ++it) {
        const double nx = -turbrest::sample_bilinear(d.dx, x + ux, y + uy);
        const double ny = -turbrest::sample_bilinear(d.dy, x + ux, y + uy);
        ux = nx;
        uy = ny;
      }
      u.dx(y, x) = ux;
      u.dy(y, x) = uy;
    }
  }
  return u;
}

inline double mean_endpoint_error(const DisplacementMap& a, const DisplacementMap& b, int margin) {
  double sum = 0.0;
  int n = 0;
  for (int y = margin; y < a.height() - margin; ++y) {
    for (int x = margin; x < a.width() - margin; ++x) {
      sum += std::hypot(a.dx(y, x) - b.dx(y, x), a.dy(y, x) - b.dy(y, x));
      ++n;
    }
  }
  return sum / n;
}

inline double mean_magnitude(const DisplacementMap& a, int margin) {
  return mean_endpoint_error(a, DisplacementMap::zero(a.width(), a.height()), margin);
}

// ---------------------------------------------------------------------------
// Barchart: vertical bar groups of decreasing period separated by mid-level
// gaps. Bars alternate high/low starting with high at each group's first column.

struct BarGroup {
  int col_begin;
  int period;  // pixels per cycle, even
  int cycles;
  int col_end() const { return col_begin + period * cycles; }
};

struct Barchart {
  int width, height;
  double low, high, gap;
  std::vector<BarGroup> groups;

  // Ideal level on the continuous axis (u in pixel units, pixel x spans [x, x+1)).
  double level_at(double u) const {
    for (const auto& g : groups) {
      if (u >= g.col_begin && u < g.col_end()) {
        const double phase = std::fmod(u - g.col_begin, static_cast<double>(g.period));
        return phase < g.period / 2.0 ? high : low;
      }
    }
    return gap;
  }

  // Piecewise-constant segments covering [0, width).
  std::vector<std::pair<double, double>> edges() const {
    std::vector<std::pair<double, double>> seg;  // (start, level)
    seg.push_back({-1e9, gap});
    for (const auto& g : groups) {
      for (int c = 0; c < g.cycles; ++c) {
        const double s = g.col_begin + c * g.period;
        seg.push_back({s, high});
        seg.push_back({s + g.period / 2.0, low});
      }
      seg.push_back({static_cast<double>(g.col_end()), gap});
    }
    return seg;
  }

  std::vector<turbrest::Zone> zones() const {
    std::vector<turbrest::Zone> z;
    for (std::size_t k = 0; k < groups.size(); ++k) {
      z.push_back({static_cast<int>(k + 1), groups[k].col_begin, groups[k].col_end(),
                   static_cast<double>(groups[k].cycles)});
    }
    return z;
  }
};

// Periods 32, 16, 12, 8, 6, 4 px with 8-px gaps.
inline Barchart standard_barchart(int height = 48) {
  Barchart chart{0, height, 20.0, 220.0, 120.0, {}};
  const int periods[] = {32, 16, 12, 8, 6, 4};
  const int cycles[] = {2, 3, 4, 5, 6, 8};
  int col = 8;
  for (int i = 0; i < 6; ++i) {
    chart.groups.push_back({col, periods[i], cycles[i]});
    col = chart.groups.back().col_end() + 8;
  }
  chart.width = col;
  return chart;
}

// Pixel-center samples of the chart convolved with a continuous Gaussian of
// width sigma (closed form through erf). sigma = 0 gives the ideal chart.
inline Frame render_barchart(const Barchart& chart, double sigma) {
  const auto seg = chart.edges();
  ImageD row(1, chart.width);
  for (int x = 0; x < chart.width; ++x) {
    const double c = x + 0.5;
    if (sigma <= 0.0) {
      row(0, x) = chart.level_at(c);
      continue;
    }
    double v = 0.0;
    for (std::size_t i = 0; i < seg.size(); ++i) {
      const double a = seg[i].first;
      const double b = i + 1 < seg.size() ? seg[i + 1].first : 1e9;
      const double phi_b = 0.5 * std::erfc(-(b - c) / (sigma * std::sqrt(2.0)));
      const double phi_a = 0.5 * std::erfc(-(a - c) / (sigma * std::sqrt(2.0)));
      v += seg[i].second * (phi_b - phi_a);
    }
    row(0, x) = v;
  }
  ImageD img = row.replicate(chart.height, 1);
  return Frame::clamped(std::move(img), 255);
}

// Double-loop NLAM: for each zone, mean over lines of (max - min).
inline std::vector<double> naive_nlam(const Frame& f, const std::vector<int>& line_rows,
                                      const std::vector<std::pair<int, int>>& columns) {
  std::vector<double> out;
  for (const auto& [c0, c1] : columns) {
    double total = 0.0;
    for (int row : line_rows) {
      double hi = -std::numeric_limits<double>::infinity();
      double lo = std::numeric_limits<double>::infinity();
      for (int x = c0; x < c1; ++x) {
        hi = std::max(hi, f(x, row));
        lo = std::min(lo, f(x, row));
      }
      total += hi - lo;
    }
    out.push_back(total / static_cast<double>(line_rows.size()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Relative L2 error between the analytic data-term gradient and central
// differences over `samples` random velocity entries.
inline double data_term_gradient_error(std::mt19937_64& rng, int samples) {
  const int n = 16, steps = 4;
  const ImageD moving = fixtures::textured_scene(n, n, rng()).pixels() / 255.0;
  const ImageD reference = fixtures::textured_scene(n, n, rng()).pixels() / 255.0;
  turbrest::VelocityField v = turbrest::VelocityField::zero(n, n, steps);
  std::normal_distribution<double> normal(0.0, 1.5);
  for (int t = 0; t < steps; ++t) {
    ImageD nx(n, n), ny(n, n);
    for (Eigen::Index i = 0; i < nx.size(); ++i) {
      nx.data()[i] = normal(rng);
      ny.data()[i] = normal(rng);
    }
    v.vx[t] = turbrest::gaussian_blur(nx, 1.0) * 2.0;
    v.vy[t] = turbrest::gaussian_blur(ny, 1.0) * 2.0;
  }
  const double weight = 50.0;
  const turbrest::DataTermEvaluation eval = turbrest::evaluate_data_term(moving, reference, v, weight);

  std::uniform_int_distribution<int> pick_t(0, steps - 1), pick_xy(0, n - 1), pick_c(0, 1);
  const double h = 1e-6;
  double num = 0.0, den = 0.0;
  for (int s = 0; s < samples; ++s) {
    const int t = pick_t(rng), y = pick_xy(rng), x = pick_xy(rng);
    const bool horiz = pick_c(rng) == 0;
    auto& comp = horiz ? v.vx[t] : v.vy[t];
    const double saved = comp(y, x);
    comp(y, x) = saved + h;
    const double up = turbrest::evaluate_data_term(moving, reference, v, weight, false).value;
    comp(y, x) = saved - h;
    const double down = turbrest::evaluate_data_term(moving, reference, v, weight, false).value;
    comp(y, x) = saved;
    const double fd = (up - down) / (2.0 * h);
    const double an = horiz ? eval.gradient.vx[t](y, x) : eval.gradient.vy[t](y, x);
    num += (an - fd) * (an - fd);
    den += fd * fd;
  }
  return std::sqrt(num / den);
}

}  // namespace fixtures
