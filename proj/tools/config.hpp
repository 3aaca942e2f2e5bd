#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "itef/geometry.hpp"
#include "itef/spectrum.hpp"

namespace itef::cli {

/// Bad flag, bad value or unknown key (exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::vector<double> omega{1.5 * kPi};  // radians; several values make a sweep
  double radius = 1.0;
  double r0 = 0.45;
  int n_r = 24;
  int n_theta = 16;
  bool enrich = true;
  std::vector<double> kappa{-40.0};
  double lambda = 1.0;
  int n_modes = 20;
  double fit_lo = 1e-3;
  double fit_hi = 1e-2;
  std::vector<double> eps{0.125, 0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625};
  std::string out_dir = "itef-out";
  std::string cache_dir;  // empty: $ITEF_CACHE_DIR or ./itef-cache
  std::uint64_t seed = 1;
  int threads = 0;  // 0: OpenMP default
  int workers = 1;  // concurrent sweep jobs
  bool svg = false;
  bool vanish = false;
  bool cache = true;

  SectorDomain domain(double omega) const;
  KParams params(double kappa) const;
};

/// "270deg", "4.71rad", "4.71", "1.5pi".
double parse_angle(const std::string& s);
std::vector<double> parse_list(const std::string& s, bool angles = false);

/// key=value lines, '#' starts a comment. Unknown keys throw UsageError.
std::map<std::string, std::string> read_config_file(const std::string& path);
void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv);
void validate(const RunConfig& cfg);

/// One line per key with its default, for --help.
std::string describe_keys();

}  // namespace itef::cli
