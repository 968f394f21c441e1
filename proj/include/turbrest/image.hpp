#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace turbrest {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Row-major pixel grid: rows are image lines (y), columns are x.
template <typename Scalar>
using Image = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using ImageD = Image<double>;

/// A single grayscale frame. Pixels are real-valued in [0, max_value];
/// quantization only happens when the frame is written to disk.
template <typename Scalar>
class BasicFrame {
 public:
  using Pixels = Image<Scalar>;

  BasicFrame(Pixels pixels, int max_value) : pixels_(std::move(pixels)), max_value_(max_value) {
    if (pixels_.rows() < 1 || pixels_.cols() < 1) {
      throw DimensionError("frame must be at least 1x1");
    }
    if (max_value_ < 1 || max_value_ > 65535) {
      throw FormatError("max_value must be in [1, 65535], got " + std::to_string(max_value_));
    }
    const Scalar ceiling = static_cast<Scalar>(max_value_);
    for (Eigen::Index i = 0; i < pixels_.size(); ++i) {
      const Scalar v = pixels_.data()[i];
      if (!std::isfinite(static_cast<double>(v)) || v < Scalar(0) || v > ceiling) {
        throw FormatError("pixel " + std::to_string(i) + " outside [0, max_value]: " +
                          std::to_string(static_cast<double>(v)));
      }
    }
  }

  static BasicFrame constant(int width, int height, Scalar value, int max_value = 255) {
    return BasicFrame(Pixels::Constant(height, width, value), max_value);
  }

  // Clamps into [0, max_value] and replaces non-finite samples by 0.
  static BasicFrame clamped(Pixels pixels, int max_value) {
    const Scalar ceiling = static_cast<Scalar>(max_value);
    pixels = pixels.unaryExpr([ceiling](Scalar v) {
      if (!std::isfinite(static_cast<double>(v))) return Scalar(0);
      return std::clamp(v, Scalar(0), ceiling);
    });
    return BasicFrame(std::move(pixels), max_value);
  }

  int width() const { return static_cast<int>(pixels_.cols()); }
  int height() const { return static_cast<int>(pixels_.rows()); }
  int max_value() const { return max_value_; }
  const Pixels& pixels() const { return pixels_; }
  Scalar operator()(int x, int y) const { return pixels_(y, x); }

  bool same_shape(const BasicFrame& other) const {
    return width() == other.width() && height() == other.height() &&
           max_value_ == other.max_value_;
  }

  friend bool operator==(const BasicFrame& a, const BasicFrame& b) {
    return a.same_shape(b) && (a.pixels_ == b.pixels_).all();
  }

 private:
  Pixels pixels_;
  int max_value_;
};

/// Ordered, non-empty list of frames sharing width, height and max_value.
template <typename Scalar>
class BasicSequence {
 public:
  using FrameType = BasicFrame<Scalar>;

  explicit BasicSequence(std::vector<FrameType> frames) : frames_(std::move(frames)) {
    if (frames_.empty()) throw DimensionError("sequence must contain at least one frame");
    for (std::size_t n = 1; n < frames_.size(); ++n) {
      if (!frames_[n].same_shape(frames_[0])) {
        throw DimensionError("frame " + std::to_string(n) + " is " +
                             std::to_string(frames_[n].width()) + "x" +
                             std::to_string(frames_[n].height()) + " (max " +
                             std::to_string(frames_[n].max_value()) + "), expected " +
                             std::to_string(frames_[0].width()) + "x" +
                             std::to_string(frames_[0].height()) + " (max " +
                             std::to_string(frames_[0].max_value()) + ")");
      }
    }
  }

  std::size_t size() const { return frames_.size(); }
  const FrameType& operator[](std::size_t n) const { return frames_[n]; }
  const std::vector<FrameType>& frames() const { return frames_; }
  auto begin() const { return frames_.begin(); }
  auto end() const { return frames_.end(); }

  int width() const { return frames_.front().width(); }
  int height() const { return frames_.front().height(); }
  int max_value() const { return frames_.front().max_value(); }

  friend bool operator==(const BasicSequence& a, const BasicSequence& b) {
    return a.frames_ == b.frames_;
  }

 private:
  std::vector<FrameType> frames_;
};

using Frame = BasicFrame<double>;
using Sequence = BasicSequence<double>;

inline double rmse(const Frame& a, const Frame& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionError("rmse: frame sizes differ");
  }
  return std::sqrt((a.pixels() - b.pixels()).square().mean());
}

}  // namespace turbrest
