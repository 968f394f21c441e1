#pragma once

#include "turbrest/image.hpp"
#include "turbrest/interpolate.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace turbrest {

/// Per-pixel displacement u, representing the map phi(x) = x + u(x).
template <typename Scalar>
struct BasicDisplacementMap {
  Image<Scalar> dx;
  Image<Scalar> dy;

  static BasicDisplacementMap zero(int width, int height) {
    return {Image<Scalar>::Zero(height, width), Image<Scalar>::Zero(height, width)};
  }
  static BasicDisplacementMap constant(int width, int height, Scalar ux, Scalar uy) {
    return {Image<Scalar>::Constant(height, width, ux), Image<Scalar>::Constant(height, width, uy)};
  }

  int width() const { return static_cast<int>(dx.cols()); }
  int height() const { return static_cast<int>(dx.rows()); }

  Image<Scalar> magnitude() const { return (dx.square() + dy.square()).sqrt(); }
  Scalar max_magnitude() const { return magnitude().maxCoeff(); }
};

using DisplacementMap = BasicDisplacementMap<double>;

/// output(x) = frame(x + u(x)), bilinear, edge-clamped.
template <typename Scalar>
BasicFrame<Scalar> apply_warp(const BasicFrame<Scalar>& frame, const BasicDisplacementMap<Scalar>& map) {
  if (map.width() != frame.width() || map.height() != frame.height()) {
    throw DimensionError("apply_warp: map is " + std::to_string(map.width()) + "x" +
                         std::to_string(map.height()) + ", frame is " + std::to_string(frame.width()) +
                         "x" + std::to_string(frame.height()));
  }
  Image<Scalar> out(frame.height(), frame.width());
  const auto& src = frame.pixels();
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      out(y, x) = static_cast<Scalar>(sample_bilinear(src, x + map.dx(y, x), y + map.dy(y, x)));
    }
  }
  // Bilinear weights are convex; clamping only removes round-off overshoot.
  return BasicFrame<Scalar>::clamped(std::move(out), frame.max_value());
}

/// Minimum determinant of the central-difference Jacobian of phi over interior
/// pixels. Maps narrower than 3 pixels fall back to one-sided differences
/// over the whole grid.
double min_jacobian(const DisplacementMap& map);

/// Per-pixel Jacobian determinant map (same differencing as min_jacobian).
ImageD jacobian_determinant(const DisplacementMap& map);

// TDSP sidecar: "TDSP", then width, height, frame count as u32 little-endian;
// then per frame row-major (dx, dy) float32 little-endian pairs.
std::string encode_displacements(const std::vector<DisplacementMap>& maps);
std::vector<DisplacementMap> decode_displacements(const std::string& bytes);
void save_displacements(const std::vector<DisplacementMap>& maps, const std::filesystem::path& path);
std::vector<DisplacementMap> load_displacements(const std::filesystem::path& path);

}  // namespace turbrest
