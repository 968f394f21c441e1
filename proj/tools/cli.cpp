#include "turbrest/cli.hpp"

#include "turbrest/displacement.hpp"
#include "turbrest/io_util.hpp"
#include "turbrest/nlam.hpp"
#include "turbrest/pgm.hpp"
#include "turbrest/temporal_filters.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>

namespace turbrest::cli {
namespace fs = std::filesystem;

SimConfig sim_config_from(const Config& config) {
  SimConfig sim;
  sim.dancing_amplitude = config.get_double("sim", "dancing_amplitude", sim.dancing_amplitude);
  sim.dancing_scale = config.get_double("sim", "dancing_scale", sim.dancing_scale);
  sim.speckle_contrast = config.get_double("sim", "speckle_contrast", sim.speckle_contrast);
  sim.scintillation_amplitude = config.get_double("sim", "scintillation_amplitude", sim.scintillation_amplitude);
  sim.blur_sigma = config.get_double("sim", "blur_sigma", sim.blur_sigma);
  sim.seed = static_cast<std::uint64_t>(config.get_int("sim", "seed", 0));
  sim.frames = static_cast<int>(config.get_int("sim", "frames", sim.frames));
  try {
    sim.validate();
  } catch (const Error& e) {
    throw ConfigError(config.origin() + ": [sim] " + e.what());
  }
  return sim;
}

RegParams reg_params_from(const Config& config) {
  RegParams p;
  p.reg_weight = config.get_double("reg", "reg_weight", p.reg_weight);
  p.kernel_sigma = config.get_double("reg", "kernel_sigma", p.kernel_sigma);
  p.timesteps = static_cast<int>(config.get_int("reg", "timesteps", p.timesteps));
  p.max_iters = static_cast<int>(config.get_int("reg", "max_iters", p.max_iters));
  p.step_size = config.get_double("reg", "step_size", p.step_size);
  p.tol = config.get_double("reg", "tol", p.tol);
  p.pyramid_levels = static_cast<int>(config.get_int("reg", "pyramid_levels", p.pyramid_levels));
  try {
    p.validate();
  } catch (const Error& e) {
    throw ConfigError(config.origin() + ": [reg] " + e.what());
  }
  return p;
}

namespace {

struct CommonOptions {
  std::string frames;
  std::string out;
  std::string config;
  std::optional<std::uint64_t> seed;
  bool force = false;
  unsigned threads = 1;
};

class Outputs {
 public:
  explicit Outputs(bool force) : force_(force) {}

  // Every target is checked before anything is written.
  void claim(const fs::path& p) const {
    if (!force_ && fs::exists(p)) throw UsageError("refusing to overwrite " + p.string() + " (use --force)");
  }

 private:
  bool force_;
};

Config load_config_or_empty(const std::string& path) {
  if (path.empty()) return Config::parse("", "<defaults>");
  return Config::load(path);
}

Sequence load_pattern(const std::string& pattern) {
  if (pattern.empty()) throw UsageError("--frames is required");
  return load_sequence(expand_pattern(pattern));
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

fs::path numbered(const fs::path& dir, std::size_t n) {
  char name[32];
  std::snprintf(name, sizeof name, "frame_%04zu.pgm", n);
  return dir / name;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_frames) {
  if (with_frames) cmd->add_option("--frames", opt.frames, "input frame pattern, e.g. 'seq_*.pgm'");
  cmd->add_option("--out", opt.out, "output path")->required();
  cmd->add_option("--config", opt.config, "key=value configuration file");
  cmd->add_option("--seed", opt.seed, "RNG seed, overrides [sim] seed");
  cmd->add_flag("--force", opt.force, "overwrite existing outputs");
  cmd->add_option("--threads", opt.threads, "worker threads, 0 = auto (never changes outputs)");
}

int run_simulate(const CommonOptions& opt, const std::string& clean_path, std::optional<int> count,
                 std::ostream& out) {
  Config cfg = load_config_or_empty(opt.config);
  if (opt.seed) cfg.set("sim", "seed", std::to_string(*opt.seed));
  if (count) cfg.set("sim", "frames", std::to_string(*count));
  const SimConfig sim = sim_config_from(cfg);
  const Frame clean = load_frame(clean_path);

  const fs::path dir(opt.out);
  Outputs outputs(opt.force);
  for (int n = 0; n < sim.frames; ++n) outputs.claim(numbered(dir, n));
  outputs.claim(dir / "displacements.tdsp");

  const auto start = std::chrono::steady_clock::now();
  const auto result = degrade(clean, sim, opt.threads);
  ensure_dir(dir);
  for (std::size_t n = 0; n < result.sequence.size(); ++n) save_frame(result.sequence[n], numbered(dir, n));
  save_displacements(result.truth.displacements, dir / "displacements.tdsp");
  out << "simulate: N=" << sim.frames << " size=" << clean.width() << "x" << clean.height()
      << " seed=" << sim.seed << " time=" << seconds_since(start) << "s\n";
  return kSuccess;
}

int run_filter(const CommonOptions& opt, const std::string& kind_name, std::optional<int> window,
               std::ostream& out) {
  const auto kind = parse_filter_kind(kind_name);
  if (!kind) throw UsageError("--kind must be mean or median, got '" + kind_name + "'");
  if (window && *window < 1) throw UsageError("--window must be >= 1");
  const Sequence seq = load_pattern(opt.frames);
  Outputs outputs(opt.force);
  const auto start = std::chrono::steady_clock::now();
  if (!window) {
    outputs.claim(opt.out);
    save_frame(temporal_filter(seq, *kind, opt.threads), opt.out);
    out << "filter: kind=" << to_string(*kind) << " N=" << seq.size() << " P=" << seq.size()
        << " time=" << seconds_since(start) << "s\n";
    return kSuccess;
  }
  const fs::path dir(opt.out);
  for (std::size_t n = 0; n < seq.size(); ++n) outputs.claim(numbered(dir, n));
  const Sequence filtered = sliding_filter(seq, *kind, WindowSpec{*window}, opt.threads);
  ensure_dir(dir);
  for (std::size_t n = 0; n < filtered.size(); ++n) save_frame(filtered[n], numbered(dir, n));
  out << "filter: kind=" << to_string(*kind) << " N=" << seq.size() << " P=" << *window
      << " time=" << seconds_since(start) << "s\n";
  return kSuccess;
}

struct WarpOptions {
  std::string warped_dir;
  std::string maps;
  std::string diagnostics;
  std::string reference;
};

int run_warp(const CommonOptions& opt, const WarpOptions& w, std::ostream& out) {
  const RegParams params = reg_params_from(load_config_or_empty(opt.config));
  const Sequence seq = load_pattern(opt.frames);
  Outputs outputs(opt.force);
  outputs.claim(opt.out);
  if (!w.warped_dir.empty()) {
    for (std::size_t n = 0; n < seq.size(); ++n) outputs.claim(numbered(w.warped_dir, n));
  }
  for (const auto* p : {&w.maps, &w.diagnostics, &w.reference}) {
    if (!p->empty()) outputs.claim(*p);
  }

  const auto start = std::chrono::steady_clock::now();
  const auto result = correct_sequence(seq, params, opt.threads);
  save_frame(result.restored, opt.out);
  if (!w.reference.empty()) save_frame(result.reference, w.reference);
  if (!w.warped_dir.empty()) {
    ensure_dir(w.warped_dir);
    for (std::size_t n = 0; n < result.warped.size(); ++n) save_frame(result.warped[n], numbered(w.warped_dir, n));
  }
  if (!w.maps.empty()) {
    std::vector<DisplacementMap> maps;
    for (const auto& d : result.diagnostics) maps.push_back(d.map);
    save_displacements(maps, w.maps);
  }
  if (!w.diagnostics.empty()) write_file_atomic(w.diagnostics, diagnostics_csv(result.diagnostics));

  std::size_t rejected = 0;
  for (bool applied : result.warp_applied) rejected += applied ? 0 : 1;
  out << "warp: N=" << seq.size() << " rejected_maps=" << rejected << " time=" << seconds_since(start)
      << "s\n";
  return kSuccess;
}

int run_nlam(const CommonOptions& opt, bool normalize, bool average, std::ostream& out) {
  if (opt.config.empty()) throw UsageError("nlam requires --config with a [nlam] section");
  const Config cfg = Config::load(opt.config);
  const Sequence seq = load_pattern(opt.frames);
  const ZonePartition part = partition_from_config(cfg, seq.width(), seq.height());
  Outputs outputs(opt.force);
  outputs.claim(opt.out);

  std::vector<NlamCurve> curves;
  for (std::size_t n = 0; n < seq.size(); ++n) curves.push_back(nlam_curve(seq[n], part, std::to_string(n)));
  if (average) curves = {average_nlam(curves)};
  if (normalize) {
    for (auto& c : curves) c = normalize_curve(c);
  }
  write_file_atomic(opt.out, curves_csv(curves, curves.size() > 1));
  out << "nlam: frames=" << seq.size() << " zones=" << part.zones.size() << " lines=" << part.lines() << "\n";
  return kSuccess;
}

int run_pipeline(const CommonOptions& opt, const std::string& clean_path, const std::string& partition_path,
                 std::ostream& out) {
  if (opt.config.empty()) throw UsageError("pipeline requires --config");
  Config cfg = Config::load(opt.config);
  if (opt.seed) cfg.set("sim", "seed", std::to_string(*opt.seed));
  std::string stage = "config";
  try {
    const SimConfig sim = sim_config_from(cfg);
    const RegParams params = reg_params_from(cfg);
    const Config partition_cfg = partition_path.empty() ? cfg : Config::load(partition_path);
    const Frame clean = load_frame(clean_path);
    const ZonePartition part = partition_from_config(partition_cfg, clean.width(), clean.height());

    const fs::path dir(opt.out);
    Outputs outputs(opt.force);
    for (const char* name : {"rmse.csv", "nlam.csv", "diagnostics.csv", "mean.pgm", "median.pgm",
                             "warp_median.pgm"}) {
      outputs.claim(dir / name);
    }

    stage = "simulate";
    const auto degraded = degrade(clean, sim, opt.threads);
    stage = "filter";
    const Frame mean = temporal_mean(degraded.sequence, opt.threads);
    const Frame median = temporal_median(degraded.sequence, opt.threads);
    stage = "warp";
    const auto corrected = correct_sequence(degraded.sequence, params, opt.threads);

    stage = "nlam";
    const std::vector<std::pair<std::string, const Frame*>> methods = {
        {"clean", &clean}, {"mean", &mean}, {"median", &median}, {"warp_median", &corrected.restored}};
    std::string rmse_csv = "method,rmse\n";
    std::string nlam_csv = "method,zone,frequency_cpp,delta_s\n";
    for (const auto& [name, frame] : methods) {
      rmse_csv += name + "," + format_number(rmse(*frame, clean)) + "\n";
      for (const auto& p : nlam_curve(*frame, part, name).points) {
        nlam_csv += name + "," + std::to_string(p.zone) + "," + format_number(p.frequency) + "," +
                    format_number(p.delta_s) + "\n";
      }
    }

    stage = "report";
    ensure_dir(dir);
    write_file_atomic(dir / "rmse.csv", rmse_csv);
    write_file_atomic(dir / "nlam.csv", nlam_csv);
    write_file_atomic(dir / "diagnostics.csv", diagnostics_csv(corrected.diagnostics));
    save_frame(mean, dir / "mean.pgm");
    save_frame(median, dir / "median.pgm");
    save_frame(corrected.restored, dir / "warp_median.pgm");
    out << rmse_csv;
    return kSuccess;
  } catch (const UsageError& e) {
    throw UsageError("[" + stage + "] " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError("[" + stage + "] " + e.what());
  } catch (const std::exception& e) {
    throw Error("[" + stage + "] " + e.what());
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Turbulence-degraded image sequence restoration and NLAM measurement", "turbrest"};
  app.require_subcommand(1);

  CommonOptions sim_opt, filter_opt, warp_opt, nlam_opt, pipe_opt;
  std::string clean_path, pipe_clean, kind, partition;
  std::optional<int> count, window;
  WarpOptions warp_extra;
  bool normalize = false, average = false;

  auto* sim = app.add_subcommand("simulate", "degrade a clean frame into a synthetic turbulent sequence");
  add_common(sim, sim_opt, false);
  sim->add_option("--clean", clean_path, "clean PGM frame")->required();
  sim->add_option("--count", count, "frames to generate, overrides [sim] frames");

  auto* filter = app.add_subcommand("filter", "temporal mean/median, whole-sequence or sliding");
  add_common(filter, filter_opt, true);
  filter->add_option("--kind", kind, "mean or median")->required()->check(CLI::IsMember({"mean", "median"}));
  filter->add_option("--window", window, "sliding window length P; output is then a directory");

  auto* warp = app.add_subcommand("warp", "diffeomorphic correction onto the median, then re-median");
  add_common(warp, warp_opt, true);
  warp->add_option("--warped-dir", warp_extra.warped_dir, "directory for the warped frames");
  warp->add_option("--maps", warp_extra.maps, "TDSP file for the recovered displacement maps");
  warp->add_option("--diagnostics", warp_extra.diagnostics, "per-frame registration CSV");
  warp->add_option("--reference", warp_extra.reference, "write the median reference frame here");

  auto* nlam = app.add_subcommand("nlam", "NLAM pseudo-MTF curves of barchart frames");
  add_common(nlam, nlam_opt, true);
  nlam->add_flag("--normalize", normalize, "divide by the lowest-frequency gain");
  nlam->add_flag("--average", average, "emit the mean curve over all frames");

  auto* pipe = app.add_subcommand("pipeline", "simulate, restore with every method, measure");
  add_common(pipe, pipe_opt, false);
  pipe->add_option("--clean", pipe_clean, "clean PGM frame")->required();
  pipe->add_option("--partition", partition, "partition config overriding the [nlam] section");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "turbrest: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (*sim) return run_simulate(sim_opt, clean_path, count, out);
    if (*filter) return run_filter(filter_opt, kind, window, out);
    if (*warp) return run_warp(warp_opt, warp_extra, out);
    if (*nlam) return run_nlam(nlam_opt, normalize, average, out);
    if (*pipe) return run_pipeline(pipe_opt, pipe_clean, partition, out);
  } catch (const UsageError& e) {
    err << "turbrest: " << e.what() << "\n";
    return kUsageError;
  } catch (const ConfigError& e) {
    err << "turbrest: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "turbrest: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kUsageError;
}

}  // namespace turbrest::cli
