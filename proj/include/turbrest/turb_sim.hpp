#pragma once

#include "turbrest/displacement.hpp"
#include "turbrest/image.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace turbrest {

/// Parameters of the synthetic turbulence degradation.
struct SimConfig {
  double dancing_amplitude = 0.0;        // peak displacement, pixels
  double dancing_scale = 8.0;            // displacement correlation length, pixels
  double speckle_contrast = 0.0;         // sigma of the multiplicative speckle factor
  double scintillation_amplitude = 0.0;  // peak deviation of the smooth gain field from 1
  double blur_sigma = 0.0;               // Gaussian PSF width, pixels
  std::uint64_t seed = 0;
  int frames = 1;

  void validate() const;
};

struct GroundTruth {
  Frame clean;
  std::vector<DisplacementMap> displacements;  // frame n = clean warped by displacements[n]
};

struct DegradedSequence {
  Sequence sequence;
  GroundTruth truth;
};

// Seed of the RNG substream owned by frame `index`.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

/// White noise per component, Gaussian-smoothed with width `scale`, rescaled so
/// the largest vector magnitude equals `amplitude`.
DisplacementMap random_smooth_displacement(int width, int height, double amplitude, double scale,
                                           std::mt19937_64& rng);

// Smooth zero-mean field with peak absolute value 1 (all zeros if degenerate).
ImageD random_smooth_field(int width, int height, double scale, std::mt19937_64& rng);

/// Per frame: warp by a fresh random displacement, Gaussian blur, multiply by a
/// scintillation gain (spatial mean 1) and a speckle factor (mean 1, clamped
/// non-negative), clamp to [0, max_value]. Frames use independent substreams,
/// so the result does not depend on `threads`.
DegradedSequence degrade(const Frame& clean, const SimConfig& config, unsigned threads = 1);

}  // namespace turbrest
