#include "config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace itef::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw UsageError("bad number for " + key + ": '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x)) throw UsageError("expected an integer for " + key + ": '" + v + "'");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw UsageError("expected on/off for " + key + ": '" + v + "'");
}

}  // namespace

SectorDomain RunConfig::domain(double omega) const {
  try {
    return make_sector(omega, radius, r0);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

KParams RunConfig::params(double k) const {
  KParams p;
  p.kappa = k;
  p.lambda = lambda;
  return p;
}

double parse_angle(const std::string& raw) {
  const std::string s = trim(raw);
  auto ends = [&](const std::string& suf) {
    return s.size() > suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (ends("deg")) return to_double("angle", s.substr(0, s.size() - 3)) * kPi / 180.0;
  if (ends("rad")) return to_double("angle", s.substr(0, s.size() - 3));
  if (ends("pi")) return to_double("angle", s.substr(0, s.size() - 2)) * kPi;
  return to_double("angle", s);
}

std::vector<double> parse_list(const std::string& s, bool angles) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(angles ? parse_angle(item) : to_double("list", item));
  }
  if (out.empty()) throw UsageError("empty list: '" + s + "'");
  return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(n) + ": expected key=value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

void apply_config(RunConfig& c, const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv) {
    if (k == "omega") c.omega = parse_list(v, true);
    else if (k == "radius") c.radius = to_double(k, v);
    else if (k == "r0") c.r0 = to_double(k, v);
    else if (k == "n_r") c.n_r = to_int(k, v);
    else if (k == "n_theta") c.n_theta = to_int(k, v);
    else if (k == "enrich") c.enrich = to_bool(k, v);
    else if (k == "kappa") c.kappa = parse_list(v);
    else if (k == "lambda") c.lambda = to_double(k, v);
    else if (k == "n_modes") c.n_modes = to_int(k, v);
    else if (k == "fit_lo") c.fit_lo = to_double(k, v);
    else if (k == "fit_hi") c.fit_hi = to_double(k, v);
    else if (k == "eps") c.eps = parse_list(v);
    else if (k == "out_dir") c.out_dir = v;
    else if (k == "cache_dir") c.cache_dir = v;
    else if (k == "seed") c.seed = static_cast<std::uint64_t>(to_int(k, v));
    else if (k == "threads") c.threads = to_int(k, v);
    else if (k == "workers") c.workers = to_int(k, v);
    else if (k == "svg") c.svg = to_bool(k, v);
    else if (k == "vanish") c.vanish = to_bool(k, v);
    else if (k == "cache") c.cache = to_bool(k, v);
    else throw UsageError("unknown config key '" + k + "'");
  }
}

void validate(const RunConfig& c) {
  for (double w : c.omega) (void)c.domain(w);
  if (c.n_r < 4 || c.n_theta < 4) throw UsageError("n_r and n_theta must be >= 4");
  if (!(c.lambda > 0.0)) throw UsageError("lambda must be positive");
  for (double k : c.kappa) {
    if (!(k < 0.0)) throw UsageError("kappa must be negative");
  }
  if (c.n_modes < 1) throw UsageError("n_modes must be >= 1");
  if (!(c.fit_lo > 0.0 && c.fit_hi > c.fit_lo && c.fit_hi < 1.0)) {
    throw UsageError("fit window must satisfy 0 < fit_lo < fit_hi < 1");
  }
  for (double e : c.eps) {
    if (!(e > 0.0 && e <= c.radius)) throw UsageError("eps values must lie in (0, radius]");
  }
  if (c.threads < 0 || c.workers < 1) throw UsageError("threads >= 0 and workers >= 1 required");
}

std::string describe_keys() {
  const RunConfig d;
  std::ostringstream os;
  os << "Config keys (key=value, '#' comments; flags override file values):\n"
     << "  omega     opening angle(s), suffix deg|rad|pi, comma list sweeps   [270deg]\n"
     << "  radius    outer radius R                                           [" << d.radius << "]\n"
     << "  r0        cutoff radius, blend on [r0/2, 2 r0]                     [" << d.r0 << "]\n"
     << "  n_r       radial basis size                                        [" << d.n_r << "]\n"
     << "  n_theta   angular basis size                                       [" << d.n_theta << "]\n"
     << "  enrich    singular enrichment on|off                               [on]\n"
     << "  kappa     kappa < 0, comma list sweeps                             [-40]\n"
     << "  lambda    lambda > 0                                               [" << d.lambda << "]\n"
     << "  n_modes   number of K-eigenmodes                                   [" << d.n_modes << "]\n"
     << "  fit_lo    blow-up fit window start (fraction of R)                 [" << d.fit_lo << "]\n"
     << "  fit_hi    blow-up fit window end (fraction of R)                   [" << d.fit_hi << "]\n"
     << "  eps       corner-average radii, comma list                         [2^-3..2^-8]\n"
     << "  out_dir   output directory                                         [" << d.out_dir << "]\n"
     << "  cache_dir matrix cache directory            [$ITEF_CACHE_DIR or itef-cache]\n"
     << "  cache     use the matrix cache on|off                              [on]\n"
     << "  seed      contour perturbation seed                                [" << d.seed << "]\n"
     << "  threads   OpenMP threads per job, 0 = default                      [0]\n"
     << "  workers   concurrent sweep jobs                                    [1]\n"
     << "  svg       write SVG plots on|off                                   [off]\n"
     << "  vanish    pipeline in convex-vanishing mode on|off                 [off]\n";
  return os.str();
}

}  // namespace itef::cli
