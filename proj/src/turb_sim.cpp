#include "turbrest/turb_sim.hpp"

#include "turbrest/gaussian.hpp"
#include "turbrest/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace turbrest {
namespace {

ImageD white_noise(int width, int height, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ImageD noise(height, width);
  for (Eigen::Index i = 0; i < noise.size(); ++i) noise.data()[i] = normal(rng);
  return noise;
}

// Smoothed white noise that is statistically stationary up to the border:
// the noise is drawn on a grid padded by the kernel radius and cropped after
// smoothing, so edge replication never inflates the variance near the edges.
ImageD smooth_noise(int width, int height, double scale, std::mt19937_64& rng) {
  const int pad = static_cast<int>(gaussian_kernel(scale).size() / 2);
  const ImageD smoothed = gaussian_blur(white_noise(width + 2 * pad, height + 2 * pad, rng), scale);
  return smoothed.block(pad, pad, height, width);
}

double scintillation_scale(int width, int height) {
  return std::max(1.0, std::max(width, height) / 8.0);
}

}  // namespace

void SimConfig::validate() const {
  auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!finite_nonneg(dancing_amplitude)) throw Error("dancing_amplitude must be >= 0");
  if (!(std::isfinite(dancing_scale) && dancing_scale > 0.0)) throw Error("dancing_scale must be > 0");
  if (!finite_nonneg(speckle_contrast)) throw Error("speckle_contrast must be >= 0");
  if (!finite_nonneg(scintillation_amplitude)) throw Error("scintillation_amplitude must be >= 0");
  if (!finite_nonneg(blur_sigma)) throw Error("blur_sigma must be >= 0");
  if (frames < 1) throw Error("frames must be >= 1");
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 over a mix of seed and index.
  std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

DisplacementMap random_smooth_displacement(int width, int height, double amplitude, double scale,
                                           std::mt19937_64& rng) {
  if (!(amplitude >= 0.0)) throw Error("amplitude must be >= 0");
  if (!(scale > 0.0)) throw Error("scale must be > 0");
  if (amplitude == 0.0) return DisplacementMap::zero(width, height);
  DisplacementMap map{smooth_noise(width, height, scale, rng), smooth_noise(width, height, scale, rng)};
  const double peak = map.max_magnitude();
  if (!(peak > 0.0)) return DisplacementMap::zero(width, height);
  map.dx *= amplitude / peak;
  map.dy *= amplitude / peak;
  return map;
}

ImageD random_smooth_field(int width, int height, double scale, std::mt19937_64& rng) {
  ImageD field = smooth_noise(width, height, scale, rng);
  field -= field.mean();
  const double peak = field.abs().maxCoeff();
  if (!(peak > 0.0)) return ImageD::Zero(height, width);
  return field / peak;
}

DegradedSequence degrade(const Frame& clean, const SimConfig& config, unsigned threads) {
  config.validate();
  const int w = clean.width(), h = clean.height();
  const auto count = static_cast<std::size_t>(config.frames);
  std::vector<std::optional<Frame>> frames(count);
  std::vector<DisplacementMap> displacements(count);

  parallel_for(count, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t n = begin; n < end; ++n) {
      std::mt19937_64 rng(substream_seed(config.seed, n));
      DisplacementMap disp =
          random_smooth_displacement(w, h, config.dancing_amplitude, config.dancing_scale, rng);
      ImageD img = apply_warp(clean, disp).pixels();
      img = gaussian_blur(img, config.blur_sigma);
      if (config.scintillation_amplitude > 0.0) {
        const ImageD field = random_smooth_field(w, h, scintillation_scale(w, h), rng);
        img *= (1.0 + config.scintillation_amplitude * field).max(0.0);
      }
      if (config.speckle_contrast > 0.0) {
        img *= (1.0 + config.speckle_contrast * white_noise(w, h, rng)).max(0.0);
      }
      frames[n].emplace(Frame::clamped(std::move(img), clean.max_value()));
      displacements[n] = std::move(disp);
    }
  });

  std::vector<Frame> out;
  out.reserve(count);
  for (auto& f : frames) out.push_back(std::move(*f));
  return {Sequence(std::move(out)), GroundTruth{clean, std::move(displacements)}};
}

}  // namespace turbrest
