#pragma once

#include <ostream>
#include <string>

#include "config.hpp"

namespace itef::cli {

enum ExitCode { kOk = 0, kUsage = 1, kNumerical = 2 };

// CSV goes to `out` (roots, omega0, angular, cache) or to files under cfg.out_dir;
// progress and diagnostics go to `log`.
int cmd_roots(const RunConfig& cfg, std::ostream& out, std::ostream& log, double re_max = 1.0);
int cmd_omega0(std::ostream& out);
int cmd_angular(const RunConfig& cfg, int root_index, int samples, std::ostream& out, std::ostream& log);
int cmd_spectrum(const RunConfig& cfg, std::ostream& log);
int cmd_localize(const RunConfig& cfg, std::ostream& log);
int cmd_vanish(const RunConfig& cfg, std::ostream& log);
int cmd_pipeline(const RunConfig& cfg, std::ostream& log);
int cmd_cache(const RunConfig& cfg, const std::string& action, std::ostream& out, std::ostream& log);

/// Column documentation for --help.
std::string describe_outputs();

}  // namespace itef::cli
