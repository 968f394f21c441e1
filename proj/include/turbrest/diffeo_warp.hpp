#pragma once

#include "turbrest/displacement.hpp"
#include "turbrest/image.hpp"

#include <string>
#include <vector>

namespace turbrest {

/// Time-discretized velocity field on [0, 1]: one (vx, vy) grid per timestep,
/// in pixels per unit time.
struct VelocityField {
  std::vector<ImageD> vx;
  std::vector<ImageD> vy;

  static VelocityField zero(int width, int height, int timesteps);
  static VelocityField constant(int width, int height, int timesteps, double ux, double uy);

  int timesteps() const { return static_cast<int>(vx.size()); }
  int width() const { return vx.empty() ? 0 : static_cast<int>(vx.front().cols()); }
  int height() const { return vx.empty() ? 0 : static_cast<int>(vx.front().rows()); }
  double dt() const { return 1.0 / timesteps(); }
  void validate() const;
};

struct RegParams {
  double reg_weight = 1e4;    // C, weight of the L2 data term (intensities scaled to [0, 1])
  double kernel_sigma = 4.0;  // width of the Gaussian smoothing kernel defining the V-norm, finest level
  int timesteps = 8;
  int max_iters = 200;    // per pyramid level
  double step_size = 0.5; // largest per-iteration velocity change, pixels
  double tol = 1e-4;      // relative energy decrease below which a level stops
  int pyramid_levels = 3;

  void validate() const;
};

struct RegistrationResult {
  DisplacementMap map;               // phi = x + map, moving(phi(x)) ~ reference(x)
  std::vector<double> energy_trace;  // finest level, initial energy first
  std::vector<std::vector<double>> level_traces;  // coarsest level first
  double data_term = 0.0;
  double regularity_term = 0.0;
  int iterations = 0;  // summed over levels
  bool converged = false;
  double min_jacobian = 1.0;

  double final_energy() const { return energy_trace.empty() ? 0.0 : energy_trace.back(); }
  bool diffeomorphic() const { return min_jacobian > 0.0; }
};

/// Forward Euler flow phi_{k+1}(x) = phi_k(x) + dt * v_k(phi_k(x)) from the
/// identity; returns phi_T - id.
DisplacementMap integrate_flow(const VelocityField& velocity);

struct DataTermEvaluation {
  double value = 0.0;
  VelocityField gradient;  // d value / d velocity, empty unless requested
};

/// 0.5 * weight * sum_x (moving(phi(x)) - reference(x))^2 for the flow of
/// `velocity`, and its exact gradient with respect to every velocity sample
/// (discrete adjoint of the Euler scheme and the bilinear sampling).
DataTermEvaluation evaluate_data_term(const ImageD& moving, const ImageD& reference,
                                      const VelocityField& velocity, double weight,
                                      bool with_gradient = true);

/// Registers `moving` onto `reference` by monotone gradient descent on
/// 0.5 * sum_t dt |v_t|_V^2 + (C/2) |moving o phi - reference|^2 over a
/// coarse-to-fine pyramid.
RegistrationResult register_frame(const Frame& moving, const Frame& reference, const RegParams& params);

struct CorrectionResult {
  Sequence warped;
  Frame reference;  // temporal median of the input
  Frame restored;   // temporal median of the warped sequence
  std::vector<RegistrationResult> diagnostics;
  std::vector<bool> warp_applied;  // false when the map failed the Jacobian check
};

/// One pass of: median reference, register every frame onto it, warp, re-median.
/// A map whose min_jacobian is <= 0 is not applied; that frame enters the
/// second median unwarped and the failure shows in its diagnostics.
CorrectionResult correct_sequence(const Sequence& seq, const RegParams& params, unsigned threads = 1);

// "frame,final_energy,iterations,min_jacobian,converged"
std::string diagnostics_csv(const std::vector<RegistrationResult>& diagnostics);

}  // namespace turbrest
