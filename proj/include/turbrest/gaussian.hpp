#pragma once

#include "turbrest/image.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace turbrest {

enum class Boundary {
  Clamp,  // replicate edge pixels
  Zero,   // zero padding; the resulting operator is a symmetric matrix
};

// Normalized taps of radius ceil(3 sigma). sigma <= 0 gives the single tap {1}.
inline std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) return {1.0};
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    const double w = std::exp(-0.5 * (k * k) / (sigma * sigma));
    taps[k + radius] = w;
    sum += w;
  }
  for (auto& w : taps) w /= sum;
  return taps;
}

namespace detail {

template <typename Scalar>
void convolve_rows(const Image<Scalar>& in, Image<Scalar>& out, const std::vector<double>& taps,
                   Boundary boundary) {
  const int radius = static_cast<int>(taps.size() / 2);
  const int rows = static_cast<int>(in.rows());
  const int cols = static_cast<int>(in.cols());
  for (int y = 0; y < rows; ++y) {
    const Scalar* src = in.data() + static_cast<std::ptrdiff_t>(y) * cols;
    Scalar* dst = out.data() + static_cast<std::ptrdiff_t>(y) * cols;
    for (int x = 0; x < cols; ++x) {
      double acc = 0.0;
      if (x >= radius && x + radius < cols) {
        for (int k = -radius; k <= radius; ++k) acc += taps[k + radius] * src[x + k];
      } else if (boundary == Boundary::Clamp) {
        for (int k = -radius; k <= radius; ++k) acc += taps[k + radius] * src[std::clamp(x + k, 0, cols - 1)];
      } else {
        for (int k = -radius; k <= radius; ++k) {
          const int xx = x + k;
          if (xx >= 0 && xx < cols) acc += taps[k + radius] * src[xx];
        }
      }
      dst[x] = static_cast<Scalar>(acc);
    }
  }
}

}  // namespace detail

/// Separable Gaussian smoothing of width `sigma` pixels.
template <typename Scalar>
Image<Scalar> gaussian_blur(const Image<Scalar>& image, double sigma, Boundary boundary = Boundary::Clamp) {
  if (!(sigma > 0.0)) return image;
  const auto taps = gaussian_kernel(sigma);
  Image<Scalar> horizontal(image.rows(), image.cols());
  detail::convolve_rows(image, horizontal, taps, boundary);
  Image<Scalar> transposed = horizontal.transpose();
  Image<Scalar> vertical(transposed.rows(), transposed.cols());
  detail::convolve_rows(transposed, vertical, taps, boundary);
  return vertical.transpose();
}

}  // namespace turbrest
