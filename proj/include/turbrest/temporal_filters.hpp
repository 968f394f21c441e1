#pragma once

#include "turbrest/image.hpp"
#include "turbrest/parallel.hpp"

#include <algorithm>
#include <optional>
#include <string_view>
#include <vector>

namespace turbrest {

enum class FilterKind { Mean, Median };

inline std::optional<FilterKind> parse_filter_kind(std::string_view name) {
  if (name == "mean") return FilterKind::Mean;
  if (name == "median") return FilterKind::Median;
  return std::nullopt;
}

inline const char* to_string(FilterKind kind) { return kind == FilterKind::Mean ? "mean" : "median"; }

/// Sliding window of P frames centered on the output index: offsets
/// -floor(P/2) .. ceil(P/2)-1, with indices outside the sequence clamped to the
/// first/last frame.
struct WindowSpec {
  int window = 1;

  std::vector<std::size_t> indices(std::size_t center, std::size_t count) const {
    const int lo = -(window / 2);
    const int hi = (window + 1) / 2 - 1;
    std::vector<std::size_t> out;
    out.reserve(static_cast<std::size_t>(window));
    for (int off = lo; off <= hi; ++off) {
      const long idx = static_cast<long>(center) + off;
      out.push_back(static_cast<std::size_t>(std::clamp<long>(idx, 0, static_cast<long>(count) - 1)));
    }
    return out;
  }
};

namespace detail {

// Reduces the listed frames pixel-wise. Each pixel is reduced independently,
// so the row partition across workers cannot change the result.
template <typename Scalar>
Image<Scalar> reduce_frames(const std::vector<const Image<Scalar>*>& stack, FilterKind kind,
                            unsigned threads) {
  const auto rows = stack.front()->rows();
  const auto cols = stack.front()->cols();
  const std::size_t n = stack.size();
  Image<Scalar> out(rows, cols);
  parallel_for(static_cast<std::size_t>(rows), threads, [&](std::size_t r0, std::size_t r1) {
    std::vector<Scalar> buffer(n);
    for (auto y = static_cast<Eigen::Index>(r0); y < static_cast<Eigen::Index>(r1); ++y) {
      for (Eigen::Index x = 0; x < cols; ++x) {
        if (kind == FilterKind::Mean) {
          Scalar sum = 0;
          for (const auto* img : stack) sum += (*img)(y, x);
          out(y, x) = sum / static_cast<Scalar>(n);
        } else {
          for (std::size_t k = 0; k < n; ++k) buffer[k] = (*stack[k])(y, x);
          // Lower median: index (n-1)/2 of the sorted temporal vector.
          auto mid = buffer.begin() + static_cast<std::ptrdiff_t>((n - 1) / 2);
          std::nth_element(buffer.begin(), mid, buffer.end());
          out(y, x) = *mid;
        }
      }
    }
  });
  return out;
}

template <typename Scalar>
std::vector<const Image<Scalar>*> whole_stack(const BasicSequence<Scalar>& seq) {
  std::vector<const Image<Scalar>*> stack;
  stack.reserve(seq.size());
  for (const auto& f : seq) stack.push_back(&f.pixels());
  return stack;
}

}  // namespace detail

template <typename Scalar>
BasicFrame<Scalar> temporal_filter(const BasicSequence<Scalar>& seq, FilterKind kind, unsigned threads = 1) {
  return BasicFrame<Scalar>(detail::reduce_frames(detail::whole_stack(seq), kind, threads), seq.max_value());
}

/// Pixel-wise arithmetic mean over all frames.
template <typename Scalar>
BasicFrame<Scalar> temporal_mean(const BasicSequence<Scalar>& seq, unsigned threads = 1) {
  return temporal_filter(seq, FilterKind::Mean, threads);
}

/// Pixel-wise median over all frames; for an even count the lower of the two
/// middle values, so every output pixel is one of its input samples.
template <typename Scalar>
BasicFrame<Scalar> temporal_median(const BasicSequence<Scalar>& seq, unsigned threads = 1) {
  return temporal_filter(seq, FilterKind::Median, threads);
}

/// Time-shifted filter: output frame n reduces the window of frames centered
/// on n. Output length equals input length.
template <typename Scalar>
BasicSequence<Scalar> sliding_filter(const BasicSequence<Scalar>& seq, FilterKind kind, WindowSpec spec,
                                     unsigned threads = 1) {
  if (spec.window < 1) throw Error("window must be >= 1, got " + std::to_string(spec.window));
  std::vector<BasicFrame<Scalar>> out;
  out.reserve(seq.size());
  for (std::size_t n = 0; n < seq.size(); ++n) {
    std::vector<const Image<Scalar>*> stack;
    for (std::size_t idx : spec.indices(n, seq.size())) stack.push_back(&seq[idx].pixels());
    out.emplace_back(detail::reduce_frames(stack, kind, threads), seq.max_value());
  }
  return BasicSequence<Scalar>(std::move(out));
}

}  // namespace turbrest
