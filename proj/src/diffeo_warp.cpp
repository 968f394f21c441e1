#include "turbrest/diffeo_warp.hpp"

#include "turbrest/gaussian.hpp"
#include "turbrest/interpolate.hpp"
#include "turbrest/io_util.hpp"
#include "turbrest/parallel.hpp"
#include "turbrest/temporal_filters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace turbrest {
namespace {

constexpr int kMinPyramidSize = 8;
constexpr double kMinStep = 1e-4;  // pixels
constexpr double kStepGrowth = 1.5;

struct Trajectories {
  std::vector<ImageD> px, py;  // positions phi_0 .. phi_T
};

Trajectories integrate(const VelocityField& v, bool keep_all) {
  const int w = v.width(), h = v.height(), steps = v.timesteps();
  const double dt = v.dt();
  ImageD px(h, w), py(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      px(y, x) = x;
      py(y, x) = y;
    }
  }
  Trajectories tr;
  if (keep_all) {
    tr.px.reserve(steps + 1);
    tr.py.reserve(steps + 1);
  }
  for (int k = 0; k < steps; ++k) {
    if (keep_all) {
      tr.px.push_back(px);
      tr.py.push_back(py);
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double sx = sample_bilinear(v.vx[k], px(y, x), py(y, x));
        const double sy = sample_bilinear(v.vy[k], px(y, x), py(y, x));
        px(y, x) += dt * sx;
        py(y, x) += dt * sy;
      }
    }
  }
  tr.px.push_back(std::move(px));
  tr.py.push_back(std::move(py));
  return tr;
}

ImageD downsample(const ImageD& img) {
  const Eigen::Index h = (img.rows() + 1) / 2, w = (img.cols() + 1) / 2;
  ImageD out(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    const Eigen::Index y0 = 2 * y, y1 = std::min(2 * y + 1, img.rows() - 1);
    for (Eigen::Index x = 0; x < w; ++x) {
      const Eigen::Index x0 = 2 * x, x1 = std::min(2 * x + 1, img.cols() - 1);
      out(y, x) = 0.25 * (img(y0, x0) + img(y0, x1) + img(y1, x0) + img(y1, x1));
    }
  }
  return out;
}

// Resamples a coarse vector component onto a grid twice as fine and doubles it
// (pixel units halve).
ImageD upsample_component(const ImageD& coarse, Eigen::Index rows, Eigen::Index cols) {
  ImageD out(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      out(y, x) = 2.0 * sample_bilinear(coarse, (x + 0.5) / 2.0 - 0.5, (y + 0.5) / 2.0 - 0.5);
    }
  }
  return out;
}

// Optimization state at one pyramid level: weights a_t and the velocity
// v_t = K a_t, with K the zero-padded Gaussian (a symmetric operator), so
// |v_t|_V^2 = <a_t, v_t> without inverting K.
struct LevelState {
  VelocityField weights;
  VelocityField velocity;
};

class LevelProblem {
 public:
  LevelProblem(const ImageD& moving, const ImageD& reference, double weight, double sigma, int timesteps)
      : moving_(moving), reference_(reference), weight_(weight), sigma_(sigma), timesteps_(timesteps) {}

  int width() const { return static_cast<int>(moving_.cols()); }
  int height() const { return static_cast<int>(moving_.rows()); }

  ImageD smooth(const ImageD& f) const { return gaussian_blur(f, sigma_, Boundary::Zero); }

  LevelState from_weights(VelocityField weights) const {
    LevelState s{std::move(weights), VelocityField::zero(width(), height(), timesteps_)};
    for (int t = 0; t < timesteps_; ++t) {
      s.velocity.vx[t] = smooth(s.weights.vx[t]);
      s.velocity.vy[t] = smooth(s.weights.vy[t]);
    }
    return s;
  }

  LevelState zero_state() const { return from_weights(VelocityField::zero(width(), height(), timesteps_)); }

  double regularity(const LevelState& s) const {
    double sum = 0.0;
    for (int t = 0; t < timesteps_; ++t) {
      sum += (s.weights.vx[t] * s.velocity.vx[t]).sum() + (s.weights.vy[t] * s.velocity.vy[t]).sum();
    }
    return 0.5 * s.velocity.dt() * sum;
  }

  double data(const LevelState& s, bool with_gradient, VelocityField* gradient) const {
    auto eval = evaluate_data_term(moving_, reference_, s.velocity, weight_, with_gradient);
    if (gradient) *gradient = std::move(eval.gradient);
    return eval.value;
  }

  double energy(const LevelState& s) const { return data(s, false, nullptr) + regularity(s); }

  const ImageD& moving() const { return moving_; }

 private:
  const ImageD& moving_;
  const ImageD& reference_;
  double weight_;
  double sigma_;
  int timesteps_;
};

struct LevelOutcome {
  LevelState state;
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

LevelOutcome descend(const LevelProblem& problem, LevelState state, const RegParams& params) {
  LevelOutcome out;
  const int steps = params.timesteps;
  const double dt = 1.0 / steps;
  double energy = problem.energy(state);
  out.trace.push_back(energy);
  double step = params.step_size;

  for (int iter = 0; iter < params.max_iters; ++iter) {
    ++out.iterations;
    VelocityField grad;
    problem.data(state, true, &grad);

    // Descent direction in weight space u_t = a_t + g_t / dt; its image
    // K u_t is the V-gradient expressed as a velocity change.
    VelocityField dir = VelocityField::zero(problem.width(), problem.height(), steps);
    VelocityField dvel = dir;
    double peak = 0.0;
    for (int t = 0; t < steps; ++t) {
      dir.vx[t] = state.weights.vx[t] + grad.vx[t] / dt;
      dir.vy[t] = state.weights.vy[t] + grad.vy[t] / dt;
      dvel.vx[t] = problem.smooth(dir.vx[t]);
      dvel.vy[t] = problem.smooth(dir.vy[t]);
      peak = std::max(peak, (dvel.vx[t].square() + dvel.vy[t].square()).sqrt().maxCoeff());
    }
    if (!(peak > 0.0)) {
      out.converged = true;
      break;
    }

    bool accepted = false;
    double trial_energy = energy;
    LevelState trial = state;
    while (step >= kMinStep) {
      const double eps = step / peak;
      for (int t = 0; t < steps; ++t) {
        trial.weights.vx[t] = state.weights.vx[t] - eps * dir.vx[t];
        trial.weights.vy[t] = state.weights.vy[t] - eps * dir.vy[t];
        trial.velocity.vx[t] = state.velocity.vx[t] - eps * dvel.vx[t];
        trial.velocity.vy[t] = state.velocity.vy[t] - eps * dvel.vy[t];
      }
      trial_energy = problem.energy(trial);
      if (trial_energy < energy) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.converged = true;
      break;
    }

    const double relative = (energy - trial_energy) / std::max(energy, std::numeric_limits<double>::min());
    state = std::move(trial);
    energy = trial_energy;
    out.trace.push_back(energy);
    step = std::min(step * kStepGrowth, params.step_size);
    if (relative < params.tol) {
      out.converged = true;
      break;
    }
  }
  out.state = std::move(state);
  return out;
}

ImageD normalized(const Frame& f) { return f.pixels() / static_cast<double>(f.max_value()); }

}  // namespace

VelocityField VelocityField::zero(int width, int height, int timesteps) {
  return constant(width, height, timesteps, 0.0, 0.0);
}

VelocityField VelocityField::constant(int width, int height, int timesteps, double ux, double uy) {
  VelocityField v;
  v.vx.assign(timesteps, ImageD::Constant(height, width, ux));
  v.vy.assign(timesteps, ImageD::Constant(height, width, uy));
  return v;
}

void VelocityField::validate() const {
  if (vx.empty() || vx.size() != vy.size()) throw Error("velocity field needs >= 1 timestep per component");
  for (std::size_t t = 0; t < vx.size(); ++t) {
    if (vx[t].rows() != vx[0].rows() || vx[t].cols() != vx[0].cols() || vy[t].rows() != vx[0].rows() ||
        vy[t].cols() != vx[0].cols()) {
      throw DimensionError("velocity timestep " + std::to_string(t) + " has mismatched size");
    }
    if (!vx[t].allFinite() || !vy[t].allFinite()) {
      throw Error("velocity timestep " + std::to_string(t) + " is not finite");
    }
  }
}

void RegParams::validate() const {
  if (!(reg_weight > 0.0)) throw Error("reg_weight must be > 0");
  if (!(kernel_sigma > 0.0)) throw Error("kernel_sigma must be > 0");
  if (timesteps < 1) throw Error("timesteps must be >= 1");
  if (max_iters < 1) throw Error("max_iters must be >= 1");
  if (!(step_size > 0.0)) throw Error("step_size must be > 0");
  if (!(tol > 0.0 && tol < 1.0)) throw Error("tol must be in (0, 1)");
  if (pyramid_levels < 1) throw Error("pyramid_levels must be >= 1");
}

DisplacementMap integrate_flow(const VelocityField& velocity) {
  velocity.validate();
  auto tr = integrate(velocity, false);
  DisplacementMap map{std::move(tr.px.back()), std::move(tr.py.back())};
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      map.dx(y, x) -= x;
      map.dy(y, x) -= y;
    }
  }
  return map;
}

DataTermEvaluation evaluate_data_term(const ImageD& moving, const ImageD& reference,
                                      const VelocityField& velocity, double weight, bool with_gradient) {
  if (moving.rows() != reference.rows() || moving.cols() != reference.cols() ||
      velocity.width() != moving.cols() || velocity.height() != moving.rows()) {
    throw DimensionError("data term: image and velocity sizes differ");
  }
  const int w = velocity.width(), h = velocity.height(), steps = velocity.timesteps();
  const double dt = velocity.dt();
  const Trajectories tr = integrate(velocity, with_gradient);
  const ImageD& fx = tr.px.back();
  const ImageD& fy = tr.py.back();

  DataTermEvaluation out;
  ImageD lx(h, w), ly(h, w);
  double sum = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto s = sample_bilinear_gradient(moving, fx(y, x), fy(y, x));
      const double r = s.value - reference(y, x);
      sum += r * r;
      lx(y, x) = weight * r * s.dx;
      ly(y, x) = weight * r * s.dy;
    }
  }
  out.value = 0.5 * weight * sum;
  if (!with_gradient) return out;

  out.gradient = VelocityField::zero(w, h, steps);
  for (int k = steps - 1; k >= 0; --k) {
    const ImageD& px = tr.px[k];
    const ImageD& py = tr.py[k];
    ImageD& gx = out.gradient.vx[k];
    ImageD& gy = out.gradient.vy[k];
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        scatter_bilinear(gx, px(y, x), py(y, x), dt * lx(y, x));
        scatter_bilinear(gy, px(y, x), py(y, x), dt * ly(y, x));
      }
    }
    if (k == 0) break;  // phi_0 is the fixed identity
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const auto sx = sample_bilinear_gradient(velocity.vx[k], px(y, x), py(y, x));
        const auto sy = sample_bilinear_gradient(velocity.vy[k], px(y, x), py(y, x));
        const double ax = lx(y, x), ay = ly(y, x);
        lx(y, x) = ax + dt * (sx.dx * ax + sy.dx * ay);
        ly(y, x) = ay + dt * (sx.dy * ax + sy.dy * ay);
      }
    }
  }
  return out;
}

RegistrationResult register_frame(const Frame& moving, const Frame& reference, const RegParams& params) {
  params.validate();
  if (moving.width() != reference.width() || moving.height() != reference.height()) {
    throw DimensionError("register: moving is " + std::to_string(moving.width()) + "x" +
                         std::to_string(moving.height()) + ", reference is " +
                         std::to_string(reference.width()) + "x" + std::to_string(reference.height()));
  }
  if (!moving.pixels().allFinite() || !reference.pixels().allFinite()) {
    throw Error("register: non-finite pixel data");
  }

  std::vector<ImageD> mov{normalized(moving)};
  std::vector<ImageD> ref{normalized(reference)};
  while (static_cast<int>(mov.size()) < params.pyramid_levels &&
         std::min(mov.back().rows(), mov.back().cols()) / 2 >= kMinPyramidSize) {
    mov.push_back(downsample(mov.back()));
    ref.push_back(downsample(ref.back()));
  }
  const int levels = static_cast<int>(mov.size());

  RegistrationResult result;
  std::optional<VelocityField> carried;  // weights from the previous (coarser) level
  for (int level = levels - 1; level >= 0; --level) {
    const double sigma = params.kernel_sigma / std::pow(2.0, level);
    const LevelProblem problem(mov[level], ref[level], params.reg_weight, sigma, params.timesteps);
    LevelState start = problem.zero_state();
    if (carried) {
      VelocityField up = VelocityField::zero(problem.width(), problem.height(), params.timesteps);
      for (int t = 0; t < params.timesteps; ++t) {
        up.vx[t] = upsample_component(carried->vx[t], problem.height(), problem.width());
        up.vy[t] = upsample_component(carried->vy[t], problem.height(), problem.width());
      }
      LevelState seeded = problem.from_weights(std::move(up));
      // Keep the coarse estimate only if it is a better starting point here.
      if (problem.energy(seeded) < problem.energy(start)) start = std::move(seeded);
    }
    LevelOutcome outcome = descend(problem, std::move(start), params);
    result.iterations += outcome.iterations;
    result.level_traces.push_back(outcome.trace);
    if (level == 0) {
      result.energy_trace = outcome.trace;
      result.converged = outcome.converged;
      result.data_term = problem.data(outcome.state, false, nullptr);
      result.regularity_term = problem.regularity(outcome.state);
      result.map = integrate_flow(outcome.state.velocity);
    }
    carried = std::move(outcome.state.weights);
  }
  result.min_jacobian = min_jacobian(result.map);
  return result;
}

CorrectionResult correct_sequence(const Sequence& seq, const RegParams& params, unsigned threads) {
  params.validate();
  Frame reference = temporal_median(seq, threads);
  std::vector<std::optional<RegistrationResult>> regs(seq.size());
  std::vector<std::optional<Frame>> warped(seq.size());
  parallel_for(seq.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t n = begin; n < end; ++n) {
      regs[n].emplace(register_frame(seq[n], reference, params));
      warped[n].emplace(regs[n]->diffeomorphic() ? apply_warp(seq[n], regs[n]->map) : seq[n]);
    }
  });

  std::vector<Frame> frames;
  std::vector<RegistrationResult> diagnostics;
  std::vector<bool> applied;
  for (std::size_t n = 0; n < seq.size(); ++n) {
    frames.push_back(std::move(*warped[n]));
    applied.push_back(regs[n]->diffeomorphic());
    diagnostics.push_back(std::move(*regs[n]));
  }
  Sequence warped_seq(std::move(frames));
  Frame restored = temporal_median(warped_seq, threads);
  return {std::move(warped_seq), std::move(reference), std::move(restored), std::move(diagnostics),
          std::move(applied)};
}

std::string diagnostics_csv(const std::vector<RegistrationResult>& diagnostics) {
  std::string out = "frame,final_energy,iterations,min_jacobian,converged\n";
  for (std::size_t n = 0; n < diagnostics.size(); ++n) {
    const auto& d = diagnostics[n];
    out += std::to_string(n) + "," + format_number(d.final_energy()) + "," + std::to_string(d.iterations) +
           "," + format_number(d.min_jacobian) + "," + (d.converged ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace turbrest
