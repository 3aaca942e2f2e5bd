#include "itef/kernels.hpp"

#include <stdexcept>

namespace itef {

NodeTables tabulate(const DiscreteSpace& space, const PolarQuadrature& q) {
  NodeTables t;
  t.quadrature = &q;
  const int nr = static_cast<int>(q.radial.size());
  const int na = static_cast<int>(q.angular.size());
  t.radial.assign(space.radial.size(), std::vector<Derivs>(nr));
  t.angular.assign(space.angular.size(), std::vector<Derivs>(na));
  for (std::size_t a = 0; a < space.radial.size(); ++a) {
    const RadialFn& f = space.radial[a];
    auto& col = t.radial[a];
#pragma omp parallel for schedule(static)
    for (int ir = 0; ir < nr; ++ir) {
      const double r = q.radial.nodes[ir];
      col[ir] = r < f.support() ? f.derivs(r) : Derivs{};
    }
  }
  for (std::size_t a = 0; a < space.angular.size(); ++a) {
    const AngularFn& g = space.angular[a];
    auto& col = t.angular[a];
#pragma omp parallel for schedule(static)
    for (int it = 0; it < na; ++it) col[it] = g.derivs(q.angular.nodes[it]);
  }
  return t;
}

namespace {

struct RadialPairs {
  Eigen::MatrixXd m, s1, s2, pp, pq, qq;
};

struct AngularPairs {
  Eigen::MatrixXd m, s, t02, t22;
};

RadialPairs radial_pairs(const NodeTables& t) {
  const Rule1D& rule = t.quadrature->radial;
  const int n = static_cast<int>(t.radial.size());
  RadialPairs p;
  for (auto* x : {&p.m, &p.s1, &p.s2, &p.pp, &p.pq, &p.qq}) x->setZero(n, n);
#pragma omp parallel for schedule(dynamic)
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      double m = 0, s1 = 0, s2 = 0, pp = 0, pq = 0, qq = 0;
      for (std::size_t i = 0; i < rule.size(); ++i) {
        const Derivs& ra = t.radial[a][i];
        const Derivs& rb = t.radial[b][i];
        const double r = rule.nodes[i], w = rule.weights[i] * r;
        const double pa = lap_p(ra, r), pb = lap_p(rb, r);
        const double qa = lap_q(ra, r), qb = lap_q(rb, r);
        m += w * ra[0] * rb[0];
        s1 += w * ra[1] * rb[1];
        s2 += w * ra[0] * rb[0] / (r * r);
        pp += w * pa * pb;
        pq += w * pa * qb;
        qq += w * qa * qb;
      }
      p.m(a, b) = m;
      p.s1(a, b) = s1;
      p.s2(a, b) = s2;
      p.pp(a, b) = pp;
      p.pq(a, b) = pq;
      p.qq(a, b) = qq;
    }
  }
  return p;
}

AngularPairs angular_pairs(const NodeTables& t) {
  const Rule1D& rule = t.quadrature->angular;
  const int n = static_cast<int>(t.angular.size());
  AngularPairs p;
  for (auto* x : {&p.m, &p.s, &p.t02, &p.t22}) x->setZero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      double m = 0, s = 0, t02 = 0, t22 = 0;
      for (std::size_t i = 0; i < rule.size(); ++i) {
        const Derivs& ta = t.angular[a][i];
        const Derivs& tb = t.angular[b][i];
        const double w = rule.weights[i];
        m += w * ta[0] * tb[0];
        s += w * ta[1] * tb[1];
        t02 += w * ta[0] * tb[2];
        t22 += w * ta[2] * tb[2];
      }
      p.m(a, b) = m;
      p.s(a, b) = s;
      p.t02(a, b) = t02;
      p.t22(a, b) = t22;
    }
  }
  return p;
}

}  // namespace

Matrices assemble_factorized(const DiscreteSpace& space, const NodeTables& t) {
  const RadialPairs rp = radial_pairs(t);
  const AngularPairs ap = angular_pairs(t);
  const int n = static_cast<int>(space.dimension());
  Matrices out;
  out.A.setZero(n, n);
  out.S.setZero(n, n);
  out.M.setZero(n, n);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    for (int k = i; k < n; ++k) {
      double a = 0.0, s = 0.0, m = 0.0;
      for (const Term& u : space.basis[i].terms) {
        for (const Term& v : space.basis[k].terms) {
          const int ra = u.radial, rb = v.radial, ta = u.angular, tb = v.angular;
          const double c = u.coef * v.coef;
          m += c * rp.m(ra, rb) * ap.m(ta, tb);
          s += c * (rp.s1(ra, rb) * ap.m(ta, tb) + rp.s2(ra, rb) * ap.s(ta, tb));
          a += c * (rp.pp(ra, rb) * ap.m(ta, tb) + rp.pq(ra, rb) * ap.t02(ta, tb) +
                    rp.pq(rb, ra) * ap.t02(tb, ta) + rp.qq(ra, rb) * ap.t22(ta, tb));
        }
      }
      out.A(i, k) = out.A(k, i) = a;
      out.S(i, k) = out.S(k, i) = s;
      out.M(i, k) = out.M(k, i) = m;
    }
  }
  return out;
}

Matrices assemble_reference(const DiscreteSpace& space, const PolarQuadrature& q) {
  const std::size_t n = space.dimension();
  std::vector<FieldValue> vals(n);
  Matrices out;
  out.A.setZero(n, n);
  out.S.setZero(n, n);
  out.M.setZero(n, n);
  for (std::size_t ir = 0; ir < q.radial.size(); ++ir) {
    const double r = q.radial.nodes[ir];
    for (std::size_t it = 0; it < q.angular.size(); ++it) {
      const double w = q.weight(ir, it);
      for (std::size_t i = 0; i < n; ++i) vals[i] = space.evaluate(i, r, q.angular.nodes[it]);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
          out.A(i, k) += w * vals[i].lap * vals[k].lap;
          out.S(i, k) += w * (vals[i].ur * vals[k].ur + vals[i].ut * vals[k].ut / (r * r));
          out.M(i, k) += w * vals[i].u * vals[k].u;
        }
      }
    }
  }
  return out;
}

namespace {

// Coefficient of each (radial, angular) product in Σ x_i φ_i.
Eigen::MatrixXd product_coefficients(const DiscreteSpace& space, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != space.dimension()) {
    throw std::invalid_argument("coefficient vector has the wrong size");
  }
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(space.radial.size(), space.angular.size());
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    for (const Term& t : space.basis[i].terms) c(t.radial, t.angular) += x(i) * t.coef;
  }
  return c;
}

}  // namespace

std::vector<FieldValue> sample_field(const DiscreteSpace& space, const NodeTables& t,
                                     const Eigen::VectorXd& x) {
  const PolarQuadrature& q = *t.quadrature;
  const Eigen::MatrixXd c = product_coefficients(space, x);
  const int nr = static_cast<int>(q.radial.size());
  const int nfa = static_cast<int>(space.angular.size());
  const int nfr = static_cast<int>(space.radial.size());
  std::vector<FieldValue> out(q.size());
#pragma omp parallel for schedule(static)
  for (int ir = 0; ir < nr; ++ir) {
    const double r = q.radial.nodes[ir];
    std::vector<Derivs> rsum(nfa, Derivs{});
    for (int b = 0; b < nfa; ++b) {
      for (int a = 0; a < nfr; ++a) {
        const double cab = c(a, b);
        if (cab == 0.0) continue;
        for (int m = 0; m <= kJetOrder; ++m) rsum[b][m] += cab * t.radial[a][ir][m];
      }
    }
    for (std::size_t it = 0; it < q.angular.size(); ++it) {
      FieldValue v;
      for (int b = 0; b < nfa; ++b) v.add(separable_value(rsum[b], t.angular[b][it], r), 1.0);
      out[q.index(ir, it)] = v;
    }
  }
  return out;
}

std::vector<FieldValue> sample_field_reference(const DiscreteSpace& space,
                                               const PolarQuadrature& q,
                                               const Eigen::VectorXd& x) {
  std::vector<FieldValue> out(q.size());
  for (std::size_t ir = 0; ir < q.radial.size(); ++ir) {
    for (std::size_t it = 0; it < q.angular.size(); ++it) {
      out[q.index(ir, it)] = space.evaluate_field(x, q.radial.nodes[ir], q.angular.nodes[it]);
    }
  }
  return out;
}

Eigen::VectorXd project(const DiscreteSpace& space, const NodeTables& t,
                        const std::vector<double>& samples) {
  const PolarQuadrature& q = *t.quadrature;
  if (samples.size() != q.size()) throw std::invalid_argument("project: sample count mismatch");
  const int nfa = static_cast<int>(space.angular.size());
  const int nfr = static_cast<int>(space.radial.size());
  Eigen::MatrixXd pairs = Eigen::MatrixXd::Zero(nfr, nfa);
#pragma omp parallel for schedule(dynamic)
  for (int b = 0; b < nfa; ++b) {
    std::vector<double> g(q.radial.size(), 0.0);
    for (std::size_t ir = 0; ir < q.radial.size(); ++ir) {
      double s = 0.0;
      for (std::size_t it = 0; it < q.angular.size(); ++it) {
        s += q.angular.weights[it] * t.angular[b][it][0] * samples[q.index(ir, it)];
      }
      g[ir] = s * q.radial.weights[ir] * q.radial.nodes[ir];
    }
    for (int a = 0; a < nfr; ++a) {
      double s = 0.0;
      for (std::size_t ir = 0; ir < q.radial.size(); ++ir) s += t.radial[a][ir][0] * g[ir];
      pairs(a, b) = s;
    }
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.dimension());
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    for (const Term& tm : space.basis[i].terms) out(i) += tm.coef * pairs(tm.radial, tm.angular);
  }
  return out;
}

}  // namespace itef
