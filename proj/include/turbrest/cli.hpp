#pragma once

#include "turbrest/config.hpp"
#include "turbrest/diffeo_warp.hpp"
#include "turbrest/turb_sim.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace turbrest::cli {

enum ExitCode : int { kSuccess = 0, kRuntimeFailure = 1, kUsageError = 2 };

// Bad flags, missing/invalid configuration, refused overwrite.
class UsageError : public Error {
 public:
  using Error::Error;
};

SimConfig sim_config_from(const Config& config);
RegParams reg_params_from(const Config& config);

/// Runs one invocation; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace turbrest::cli
