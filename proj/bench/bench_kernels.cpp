// Parallel kernels against the serial reference implementation.
//
//   itef_bench [n_r n_theta [repeats]]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <memory>

#include "itef/discretize.hpp"
#include "itef/kernels.hpp"

using namespace itef;

namespace {

template <class Fn>
double best_of(int repeats, Fn fn) {
  double best = 1e300;
  for (int k = 0; k < repeats; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    best = std::min(best, s);
  }
  return best;
}

double max_rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

}  // namespace

int main(int argc, char** argv) {
  const int n_r = argc > 2 ? std::atoi(argv[1]) : 12;
  const int n_theta = argc > 2 ? std::atoi(argv[2]) : 8;
  const int repeats = argc > 3 ? std::atoi(argv[3]) : 3;

  const SectorDomain d = make_sector(1.5 * kPi, 1.0, 0.45);
  const DiscreteSpace space = build_space(d, n_r, n_theta, default_enrichment(d.omega));
  const PolarQuadrature q = make_quadrature(d);
  std::printf("space %zu functions, %zu quadrature nodes, %d OpenMP threads\n", space.dimension(), q.size(),
              omp_get_max_threads());

  Matrices fast, ref;
  const NodeTables t = tabulate(space, q);
  const double t_tab = best_of(repeats, [&] { (void)tabulate(space, q); });
  const double t_fast = best_of(repeats, [&] { fast = assemble_factorized(space, t); });
  const double t_ref = best_of(1, [&] { ref = assemble_reference(space, q); });
  const double dev = std::max({max_rel(fast.A, ref.A), max_rel(fast.S, ref.S), max_rel(fast.M, ref.M)});
  std::printf("%-18s %10s %10s %9s %12s\n", "kernel", "parallel", "reference", "speedup", "max rel dev");
  std::printf("%-18s %9.3fs %9.3fs %8.1fx %12.2e\n", "assemble", t_fast + t_tab, t_ref, t_ref / (t_fast + t_tab),
              dev);

  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(space.dimension()), 1.0, -1.0);
  std::vector<FieldValue> sf, sr;
  const double s_fast = best_of(repeats, [&] { sf = sample_field(space, t, x); });
  const double s_ref = best_of(1, [&] { sr = sample_field_reference(space, q, x); });
  double sdev = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < sf.size(); ++k) {
    sdev = std::max(sdev, std::abs(sf[k].u - sr[k].u));
    scale = std::max(scale, std::abs(sr[k].u));
  }
  std::printf("%-18s %9.3fs %9.3fs %8.1fx %12.2e\n", "sample_field", s_fast, s_ref, s_ref / s_fast, sdev / scale);
  return dev < 1e-10 && sdev < 1e-10 * scale ? 0 : 1;
}
