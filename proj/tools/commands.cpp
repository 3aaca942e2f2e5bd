#include "commands.hpp"

#include <omp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <mutex>
#include <sstream>

#include "itef/angular.hpp"
#include "itef/cache.hpp"
#include "itef/charroots.hpp"
#include "itef/corner.hpp"
#include "itef/discretize.hpp"
#include "itef/spectrum.hpp"
#include "svg.hpp"

namespace itef::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string cnum(std::complex<double> z) {
  if (z.imag() == 0.0) return num(z.real());
  std::ostringstream os;
  os << std::setprecision(12) << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

class Csv {
 public:
  explicit Csv(std::ostream& out) : out_(out) {}
  Csv& header(std::initializer_list<const char*> cols) {
    bool first = true;
    for (const char* c : cols) {
      out_ << (first ? "" : ",") << c;
      first = false;
    }
    out_ << "\n";
    return *this;
  }
  template <class... T>
  void row(const T&... v) {
    bool first = true;
    ((out_ << (first ? "" : ",") << v, first = false), ...);
    out_ << "\n";
  }

 private:
  std::ostream& out_;
};

std::ofstream open_out(const fs::path& p) {
  if (!p.parent_path().empty()) fs::create_directories(p.parent_path());
  std::ofstream f(p);
  if (!f) throw UsageError("cannot write " + p.string());
  return f;
}

fs::path cache_dir(const RunConfig& cfg) {
  return cfg.cache_dir.empty() ? default_cache_dir() : fs::path(cfg.cache_dir);
}

// All log writes go through one lock so sweep jobs do not interleave lines.
std::mutex log_mutex;
void say(std::ostream& log, const std::string& s) {
  std::lock_guard<std::mutex> g(log_mutex);
  log << s << "\n";
}

struct Prepared {
  SectorDomain domain;
  std::vector<CharRoot> enrichment;
  std::shared_ptr<const DiscreteSpace> space;
  OperatorBundle bundle;
};

OperatorBundle bundle_for(const RunConfig& cfg, std::shared_ptr<const DiscreteSpace> space,
                          const PolarQuadrature& q, std::ostream& log) {
  if (!cfg.cache) return assemble(std::move(space), q);
  CacheState st;
  const std::string key = cache_key(*space, q);
  OperatorBundle b = assemble_cached(std::move(space), q, cache_dir(cfg), &st);
  if (st == CacheState::Hit) {
    say(log, "cache hit " + key);
  } else {
    say(log, std::string("cache ") + to_string(st) + ", assembled " + key);
  }
  return b;
}

Prepared prepare(const RunConfig& cfg, double omega, int n_r, int n_theta, std::ostream& log) {
  Prepared p;
  p.domain = cfg.domain(omega);
  if (cfg.enrich && omega > kPi) p.enrichment = default_enrichment(omega);
  p.space = std::make_shared<const DiscreteSpace>(build_space(p.domain, n_r, n_theta, p.enrichment));
  p.bundle = bundle_for(cfg, p.space, make_quadrature(p.domain), log);
  return p;
}

std::string job_tag(double omega, double kappa) {
  std::ostringstream os;
  os << "w" << std::setprecision(10) << omega * 180.0 / kPi << "deg_k" << kappa;
  return os.str();
}

struct SpectrumRun {
  Prepared prep;
  std::vector<ItefMode> modes;
  RealnessReport realness;
  double lambda1 = 0.0;
  std::string warning;
};

SpectrumRun run_spectrum(const RunConfig& cfg, double omega, double kappa, const fs::path& csv,
                         std::ostream& log) {
  SpectrumRun s;
  s.prep = prepare(cfg, omega, cfg.n_r, cfg.n_theta, log);
  const int nd = std::min(std::max(cfg.n_r, 8), 16);
  s.lambda1 = dirichlet_lambda1(s.prep.domain, nd, std::min(std::max(cfg.n_theta, 8), 16));
  const KParams p = cfg.params(kappa);
  const int n = std::min<int>(cfg.n_modes, static_cast<int>(s.prep.bundle.dimension()));
  s.modes = k_spectrum(s.prep.bundle, p, n, s.lambda1, &s.warning);
  if (!s.warning.empty()) say(log, "warning: " + s.warning);
  s.realness = realness_scan(s.modes, p);

  const Prepared ref = prepare(cfg, omega, cfg.n_r + 8, cfg.n_theta + 8, log);
  for (auto& m : s.modes) {
    if (!m.real) continue;
    try {
      m = synthesize_itef(m);
      const HelmholtzResiduals r = helmholtz_residuals(s.prep.bundle, m, ref.bundle);
      m.residual_v = r.v;
      m.residual_w = r.w;
    } catch (const NumericalError& e) {
      say(log, "mode " + std::to_string(m.index) + ": " + e.what());
    }
  }
  std::ofstream f = open_out(csv);
  Csv c(f);
  c.header({"j", "sigma", "kappa_tilde", "lambda_tilde", "k1", "k2", "real_flag", "helmholtz_residual_v",
            "helmholtz_residual_w"});
  for (const auto& m : s.modes) {
    c.row(m.index, num(m.sigma), num(m.kappa_tilde), num(m.lambda_tilde), cnum(m.k1), cnum(m.k2),
          m.real ? 1 : 0, num(m.residual_v), num(m.residual_w));
  }
  return s;
}

struct CornerRow {
  int mode = 0;
  double F = 0, scale = 0, c1_pairing = NAN, c1_fit = NAN, alpha = NAN, corr = NAN, alpha_v = NAN,
         alpha_w = NAN;
  bool singular = false;
};

std::vector<CornerRow> run_localize(const RunConfig& cfg, const SpectrumRun& s, const fs::path& csv,
                                    std::ostream& log, std::vector<Series>* plot) {
  const Prepared& p = s.prep;
  const SectorDomain& d = p.domain;
  const std::vector<CharRoot> real = find_roots(d.omega).real_roots_in(0.0, 1.0);
  if (real.empty()) throw UsageError("localize: no real root in (0, 1)");
  auto phi = std::make_shared<const AngularProfile>(solve_profile(real.front(), d.omega));
  DualSingular eta = [&] {
    try {
      return eta1(d, real.front(), phi);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("localize: ") + e.what());
    }
  }();
  const double gamma = extraction_constant(phi->z(), *phi);
  const DualField zf = build_zeta1(p.bundle, eta);
  say(log, "zeta1: z1 = " + num(phi->z()) + ", gamma = " + num(gamma) + ", solve residual " + num(zf.residual));
  const auto predicted = laplacian_profile(phi);
  const std::pair<double, double> window{cfg.fit_lo, cfg.fit_hi};

  std::vector<CornerRow> rows(s.modes.size());
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < static_cast<int>(s.modes.size()); ++j) {
    const ItefMode& m = s.modes[j];
    CornerRow r;
    r.mode = m.index;
    const FunctionalValue fv = singular_functional(p.bundle, m, zf, p.bundle.quadrature);
    r.F = fv.F;
    r.scale = fv.scale;
    if (fv.nonzero()) {
      r.singular = true;
      const C1Estimate e = extract_c1(p.bundle, m, zf, gamma, window);
      r.c1_pairing = e.c1_pairing;
      r.c1_fit = e.c1_fit;
      const DiscreteSpace& sp = *p.space;
      const BlowupFit a = blowup_fit([&](double rr, double t) { return sp.evaluate_field(m.psi, rr, t).lap; },
                                     d, window, predicted);
      r.alpha = a.alpha;
      r.corr = a.correlation;
      if (m.synthesized) {
        r.alpha_v = blowup_fit([&](double rr, double t) {
          const FieldValue f = sp.evaluate_field(m.psi, rr, t);
          return m.lap_coef * f.lap + m.v_psi * f.u;
        }, d, window).alpha;
        r.alpha_w = blowup_fit([&](double rr, double t) {
          const FieldValue f = sp.evaluate_field(m.psi, rr, t);
          return m.lap_coef * f.lap + m.w_psi * f.u;
        }, d, window).alpha;
      }
    }
    rows[j] = r;
  }
  std::ofstream f = open_out(csv);
  Csv c(f);
  c.header({"mode", "F", "c1_pairing", "c1_fit", "alpha_fit", "correlation"});
  for (const auto& r : rows) c.row(r.mode, num(r.F), num(r.c1_pairing), num(r.c1_fit), num(r.alpha), num(r.corr));

  if (plot) {
    for (const auto& r : rows) {
      if (!r.singular) continue;
      const ItefMode& m = s.modes[r.mode - 1];
      Series lap{"|lap psi_" + std::to_string(r.mode) + "| avg", {}, {}};
      Series ref{"r^-(1-z1)", {}, {}};
      const Rule1D ang = gauss_legendre(64, 0.0, d.omega);
      for (int k = 0; k < 24; ++k) {
        const double rr = d.radius * cfg.fit_lo * std::pow(cfg.fit_hi / cfg.fit_lo, k / 23.0);
        double avg = 0.0;
        for (std::size_t i = 0; i < ang.size(); ++i) {
          avg += ang.weights[i] * std::abs(p.space->evaluate_field(m.psi, rr, ang.nodes[i]).lap);
        }
        lap.x.push_back(rr);
        lap.y.push_back(avg / d.omega);
        ref.x.push_back(rr);
        ref.y.push_back(lap.y.front() * std::pow(rr / lap.x.front(), phi->z() - 1.0));
      }
      plot->push_back(lap);
      plot->push_back(ref);
      break;
    }
  }
  return rows;
}

struct VanishRun {
  int mode = 0;
  VanishingTable table;
  RegularityReport regularity;
};

VanishRun run_vanish(const RunConfig& cfg, const SpectrumRun& s, const fs::path& csv) {
  const Prepared& p = s.prep;
  if (!p.domain.convex()) throw UsageError("vanish: requires omega < 180deg");
  const ItefMode* pick = nullptr;
  for (const auto& m : s.modes) {
    if (m.synthesized) {
      pick = &m;
      break;
    }
  }
  if (!pick) throw NumericalError("vanish: no mode with real k1 != k2");
  VanishRun v;
  v.mode = pick->index;
  v.table = convex_vanishing(p.bundle, *pick, cfg.eps);
  const DiscreteSpace& sp = *p.space;
  v.regularity = weighted_regularity_check(
      [&](double r, double t) { return sp.evaluate_field(pick->psi, r, t); }, p.domain);
  std::ofstream f = open_out(csv);
  Csv c(f);
  c.header({"epsilon", "m_v", "m_w", "beta_fit"});
  const double beta = std::min(v.table.beta_v, v.table.beta_w);
  for (const auto& r : v.table.rows) c.row(num(r.epsilon), num(r.m_v), num(r.m_w), num(beta));
  return v;
}

struct Job {
  double omega, kappa;
  fs::path dir;
};

std::vector<Job> jobs_of(const RunConfig& cfg) {
  std::vector<Job> jobs;
  const bool sweep = cfg.omega.size() * cfg.kappa.size() > 1;
  for (double w : cfg.omega) {
    for (double k : cfg.kappa) {
      jobs.push_back({w, k, sweep ? fs::path(cfg.out_dir) / job_tag(w, k) : fs::path(cfg.out_dir)});
    }
  }
  return jobs;
}

// Runs fn(job) for every (ω, κ) pair on cfg.workers concurrent jobs; returns the worst code.
template <class Fn>
int sweep(const RunConfig& cfg, std::ostream& log, Fn fn) {
  const std::vector<Job> jobs = jobs_of(cfg);
  std::vector<int> codes(jobs.size(), kOk);
  const int workers = std::min<int>(cfg.workers, static_cast<int>(jobs.size()));
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#pragma omp parallel for schedule(dynamic) num_threads(workers) if (workers > 1)
  for (int i = 0; i < static_cast<int>(jobs.size()); ++i) {
    try {
      codes[i] = fn(jobs[i]);
    } catch (const UsageError& e) {
      say(log, "error: " + std::string(e.what()));
      codes[i] = kUsage;
    } catch (const std::invalid_argument& e) {
      say(log, "error: " + std::string(e.what()));
      codes[i] = kUsage;
    } catch (const std::exception& e) {
      say(log, "numerical failure: " + std::string(e.what()));
      codes[i] = kNumerical;
    }
  }
  int worst = kOk;
  for (int c : codes) worst = std::max(worst, c);
  return worst;
}

}  // namespace

int cmd_roots(const RunConfig& cfg, std::ostream& out, std::ostream& log, double re_max) {
  Csv c(out);
  c.header({"omega_rad", "re_z", "im_z", "multiplicity", "residual"});
  for (double w : cfg.omega) {
    (void)cfg.domain(w);
    RootSearchOptions o;
    o.seed = cfg.seed;
    o.re_max = std::max(2.0, re_max);
    RootSearchResult r;
    try {
      r = find_roots(w, o);
    } catch (const RootCountMismatch& e) {
      say(log, std::string("count mismatch: ") + e.what());
      return kNumerical;
    }
    for (const auto& z : r.roots) {
      if (z.z.real() >= re_max) continue;
      c.row(num(w), num(z.z.real()), num(z.z.imag()), z.multiplicity, num(z.residual));
    }
    say(log, "omega = " + num(w) + ": argument-principle count " + std::to_string(r.winding_count) +
                 ", polished " + std::to_string(r.count_with_multiplicity()));
  }
  return kOk;
}

int cmd_omega0(std::ostream& out) {
  const OmegaThreshold t = compute_omega0();
  Csv c(out);
  c.header({"omega0_rad", "omega0_deg", "residual"});
  c.row(num(t.omega0), num(t.omega0 * 180.0 / kPi), num(t.residual));
  return t.residual < 1e-12 ? kOk : kNumerical;
}

int cmd_angular(const RunConfig& cfg, int root_index, int samples, std::ostream& out, std::ostream& log) {
  const double w = cfg.omega.front();
  (void)cfg.domain(w);
  std::vector<CharRoot> real;
  for (const auto& z : find_roots(w).roots) {
    if (z.is_real) real.push_back(z);
  }
  if (root_index < 1 || root_index > static_cast<int>(real.size())) {
    throw UsageError("angular: omega has " + std::to_string(real.size()) + " real roots in the strip");
  }
  const AngularProfile p = solve_profile(real[root_index - 1], w, samples);
  say(log, "z = " + num(p.z()) + ", ODE residual " + num(profile_ode_residual(p)));
  Csv c(out);
  c.header({"theta", "phi", "dphi", "d2phi"});
  for (std::size_t i = 0; i < p.theta.size(); ++i) c.row(num(p.theta[i]), num(p.phi[i]), num(p.dphi[i]), num(p.d2phi[i]));
  return kOk;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& log) {
  return sweep(cfg, log, [&](const Job& j) {
    const SpectrumRun s = run_spectrum(cfg, j.omega, j.kappa, j.dir / "spectrum.csv", log);
    say(log, job_tag(j.omega, j.kappa) + ": " + std::to_string(s.modes.size()) + " modes, real fraction " +
                 num(s.realness.fraction) + ", lambda1 " + num(s.lambda1));
    return kOk;
  });
}

int cmd_localize(const RunConfig& cfg, std::ostream& log) {
  return sweep(cfg, log, [&](const Job& j) {
    const SpectrumRun s = run_spectrum(cfg, j.omega, j.kappa, j.dir / "spectrum.csv", log);
    const auto rows = run_localize(cfg, s, j.dir / "corner.csv", log, nullptr);
    for (const auto& r : rows) {
      if (r.singular) {
        say(log, "first singular mode " + std::to_string(r.mode));
        return kOk;
      }
    }
    say(log, "no mode with |F| above tolerance");
    return kNumerical;
  });
}

int cmd_vanish(const RunConfig& cfg, std::ostream& log) {
  return sweep(cfg, log, [&](const Job& j) {
    const SpectrumRun s = run_spectrum(cfg, j.omega, j.kappa, j.dir / "spectrum.csv", log);
    const VanishRun v = run_vanish(cfg, s, j.dir / "vanish.csv");
    say(log, "mode " + std::to_string(v.mode) + ": beta_v " + num(v.table.beta_v) + ", beta_w " + num(v.table.beta_w) +
                 ", weighted norms " + (v.regularity.stable ? "stable" : "NOT stable"));
    return v.table.monotone_v && v.table.monotone_w && v.regularity.stable ? kOk : kNumerical;
  });
}

int cmd_pipeline(const RunConfig& cfg, std::ostream& log) {
  return sweep(cfg, log, [&](const Job& j) {
    const double w = j.omega;
    const bool vanish = cfg.vanish || w < kPi;
    if (!vanish && !(w > compute_omega0().omega0)) {
      throw UsageError("pipeline: localization needs omega in (omega0, 360deg), vanishing needs omega < 180deg");
    }
    {
      std::ofstream f = open_out(j.dir / "roots.csv");
      RunConfig one = cfg;
      one.omega = {w};
      std::ostringstream sink;
      if (const int rc = cmd_roots(one, f, sink); rc != kOk) return rc;
    }
    if (vanish && !make_sector(w, cfg.radius, cfg.r0).convex()) {
      throw UsageError("pipeline --vanish: requires omega < 180deg");
    }
    const SpectrumRun s = run_spectrum(cfg, w, j.kappa, j.dir / "spectrum.csv", log);
    std::ostringstream sum;
    sum << "omega_rad=" << num(w) << "\nkappa=" << num(j.kappa) << "\nlambda=" << num(cfg.lambda)
        << "\nn_r=" << cfg.n_r << "\nn_theta=" << cfg.n_theta << "\nmodes=" << s.modes.size()
        << "\nlambda1=" << num(s.lambda1) << "\nreal_fraction=" << num(s.realness.fraction) << "\n";
    if (!s.warning.empty()) sum << "warning=" << s.warning << "\n";
    int rc = kOk;
    if (vanish) {
      const VanishRun v = run_vanish(cfg, s, j.dir / "vanish.csv");
      sum << "vanish_mode=" << v.mode << "\nbeta_v=" << num(v.table.beta_v) << "\nbeta_w=" << num(v.table.beta_w)
          << "\nmonotone_v=" << v.table.monotone_v << "\nmonotone_w=" << v.table.monotone_w
          << "\nweighted_r2_norm=" << num(v.regularity.r2_norm.back())
          << "\nweighted_grad_norm=" << num(v.regularity.grad_norm.back())
          << "\nweighted_norms_stable=" << v.regularity.stable << "\n";
      if (!(v.table.monotone_v && v.table.monotone_w && v.regularity.stable)) rc = kNumerical;
      if (cfg.svg) {
        Series sv{"|m_v|", {}, {}}, sw{"|m_w|", {}, {}};
        for (const auto& r : v.table.rows) {
          sv.x.push_back(r.epsilon);
          sv.y.push_back(std::abs(r.m_v));
          sw.x.push_back(r.epsilon);
          sw.y.push_back(std::abs(r.m_w));
        }
        write_loglog_svg((j.dir / "vanish.svg").string(), "corner averages", "epsilon", "|m|", {sv, sw});
      }
    } else {
      std::vector<Series> plot;
      const auto rows = run_localize(cfg, s, j.dir / "corner.csv", log, cfg.svg ? &plot : nullptr);
      int first = 0;
      for (const auto& r : rows) {
        if (r.singular) {
          first = r.mode;
          sum << "singular_mode=" << r.mode << "\nF=" << num(r.F) << "\nc1_pairing=" << num(r.c1_pairing)
              << "\nc1_fit=" << num(r.c1_fit) << "\nalpha_fit=" << num(r.alpha) << "\nalpha_v=" << num(r.alpha_v)
              << "\nalpha_w=" << num(r.alpha_w) << "\ncorrelation=" << num(r.corr) << "\n";
          break;
        }
      }
      sum << "first mode index with |F_j| > tol: " << (first ? std::to_string(first) : "none") << "\n";
      if (!first) rc = kNumerical;
      if (cfg.svg && !plot.empty()) {
        write_loglog_svg((j.dir / "blowup.svg").string(), "corner blow-up", "r", "avg |lap psi|", plot);
      }
    }
    std::ofstream f = open_out(j.dir / "summary.txt");
    f << sum.str();
    say(log, sum.str());
    return rc;
  });
}

int cmd_cache(const RunConfig& cfg, const std::string& action, std::ostream& out, std::ostream& log) {
  const fs::path dir = cache_dir(cfg);
  if (action == "clear") {
    const std::size_t n = clear_cache(dir);
    say(log, "removed " + std::to_string(n) + " entries from " + dir.string());
    return kOk;
  }
  if (action != "inspect") throw UsageError("cache action must be inspect or clear");
  const auto entries = inspect_cache(dir);
  Csv c(out);
  c.header({"file", "key", "dimension", "bytes", "state"});
  int bad = 0;
  for (const auto& e : entries) {
    c.row(e.file.filename().string(), e.key, e.dimension, e.bytes, to_string(e.state));
    if (e.state == CacheState::Corrupt) {
      ++bad;
      say(log, "corrupt entry " + e.file.string() + " key '" + e.key + "': " + e.detail);
    } else if (e.state == CacheState::Stale) {
      say(log, "stale entry " + e.file.string() + " (" + e.detail + "), rebuilt on next run");
    }
  }
  say(log, std::to_string(entries.size()) + " entries in " + dir.string());
  return bad ? kNumerical : kOk;
}

std::string describe_outputs() {
  return "Outputs:\n"
         "  roots     stdout: omega_rad,re_z,im_z,multiplicity,residual (Re z in (0, 1))\n"
         "  omega0    stdout: omega0_rad,omega0_deg,residual\n"
         "  angular   stdout: theta,phi,dphi,d2phi\n"
         "  spectrum  spectrum.csv: j,sigma,kappa_tilde,lambda_tilde,k1,k2,real_flag,\n"
         "            helmholtz_residual_v,helmholtz_residual_w\n"
         "  localize  corner.csv: mode,F,c1_pairing,c1_fit,alpha_fit,correlation\n"
         "  vanish    vanish.csv: epsilon,m_v,m_w,beta_fit (beta_fit = min of the v and w fits)\n"
         "  pipeline  roots.csv, spectrum.csv, corner.csv or vanish.csv, summary.txt, SVG with --svg\n"
         "  cache     stdout: file,key,dimension,bytes,state\n"
         "Sweeps (several omega or kappa values) write into out_dir/w<deg>deg_k<kappa>/.\n"
         "Exit codes: 0 success, 1 usage error, 2 numerical-verification failure.\n";
}

}  // namespace itef::cli
