#pragma once

#include "turbrest/image.hpp"

#include <algorithm>
#include <cmath>

namespace turbrest {

// Bilinear interpolation at (x, y) in pixel coordinates. Coordinates outside
// the grid are clamped to the nearest edge.
struct BilinearCell {
  int x0, x1, y0, y1;
  double fx, fy;
  bool clamped_x, clamped_y;

  BilinearCell(double x, double y, int width, int height) {
    const double cx = std::clamp(x, 0.0, static_cast<double>(width - 1));
    const double cy = std::clamp(y, 0.0, static_cast<double>(height - 1));
    clamped_x = cx != x;
    clamped_y = cy != y;
    x0 = static_cast<int>(std::floor(cx));
    y0 = static_cast<int>(std::floor(cy));
    x1 = std::min(x0 + 1, width - 1);
    y1 = std::min(y0 + 1, height - 1);
    fx = cx - x0;
    fy = cy - y0;
  }
};

template <typename Scalar>
double sample_bilinear(const Image<Scalar>& img, double x, double y) {
  const BilinearCell c(x, y, static_cast<int>(img.cols()), static_cast<int>(img.rows()));
  const double a = img(c.y0, c.x0), b = img(c.y0, c.x1);
  const double d = img(c.y1, c.x0), e = img(c.y1, c.x1);
  return (1.0 - c.fy) * ((1.0 - c.fx) * a + c.fx * b) + c.fy * ((1.0 - c.fx) * d + c.fx * e);
}

struct SampleWithGradient {
  double value, dx, dy;
};

// Value and derivative with respect to the sample position. The derivative is
// zero along an axis where the position was clamped.
template <typename Scalar>
SampleWithGradient sample_bilinear_gradient(const Image<Scalar>& img, double x, double y) {
  const BilinearCell c(x, y, static_cast<int>(img.cols()), static_cast<int>(img.rows()));
  const double a = img(c.y0, c.x0), b = img(c.y0, c.x1);
  const double d = img(c.y1, c.x0), e = img(c.y1, c.x1);
  SampleWithGradient s;
  s.value = (1.0 - c.fy) * ((1.0 - c.fx) * a + c.fx * b) + c.fy * ((1.0 - c.fx) * d + c.fx * e);
  s.dx = c.clamped_x ? 0.0 : (1.0 - c.fy) * (b - a) + c.fy * (e - d);
  s.dy = c.clamped_y ? 0.0 : (1.0 - c.fx) * (d - a) + c.fx * (e - b);
  // On a grid line the interpolant has a kink; report the mean of the two
  // one-sided slopes, which is what a central difference sees.
  if (!c.clamped_x && c.fx == 0.0 && c.x0 > 0) {
    const double left = (1.0 - c.fy) * (a - img(c.y0, c.x0 - 1)) + c.fy * (d - img(c.y1, c.x0 - 1));
    s.dx = 0.5 * (s.dx + left);
  }
  if (!c.clamped_y && c.fy == 0.0 && c.y0 > 0) {
    const double up = (1.0 - c.fx) * (a - img(c.y0 - 1, c.x0)) + c.fx * (b - img(c.y0 - 1, c.x1));
    s.dy = 0.5 * (s.dy + up);
  }
  return s;
}

// Adjoint of sample_bilinear with respect to the sampled image values.
template <typename Scalar>
void scatter_bilinear(Image<Scalar>& target, double x, double y, double weight) {
  const BilinearCell c(x, y, static_cast<int>(target.cols()), static_cast<int>(target.rows()));
  target(c.y0, c.x0) += weight * (1.0 - c.fx) * (1.0 - c.fy);
  target(c.y0, c.x1) += weight * c.fx * (1.0 - c.fy);
  target(c.y1, c.x0) += weight * (1.0 - c.fx) * c.fy;
  target(c.y1, c.x1) += weight * c.fx * c.fy;
}

}  // namespace turbrest
