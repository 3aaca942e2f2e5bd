#pragma once

// Assembly and field-sampling kernels. The *_reference variants evaluate every basis
// function pointwise on the full tensor grid in a single thread; the default variants
// use separable one-dimensional tables and OpenMP.

#include <vector>

#include <Eigen/Dense>

#include "itef/discretize.hpp"

namespace itef {

/// Derivatives 0..4 of every radial and angular function at the quadrature nodes.
struct NodeTables {
  const PolarQuadrature* quadrature = nullptr;
  std::vector<std::vector<Derivs>> radial;   // [fn][ir]
  std::vector<std::vector<Derivs>> angular;  // [fn][it]
};

NodeTables tabulate(const DiscreteSpace& space, const PolarQuadrature& q);

struct Matrices {
  Eigen::MatrixXd A, S, M;
};

Matrices assemble_factorized(const DiscreteSpace& space, const NodeTables& t);
Matrices assemble_reference(const DiscreteSpace& space, const PolarQuadrature& q);

/// Field values Σ x_i φ_i at every node, ordered as PolarQuadrature::index.
std::vector<FieldValue> sample_field(const DiscreteSpace& space, const NodeTables& t,
                                     const Eigen::VectorXd& x);
std::vector<FieldValue> sample_field_reference(const DiscreteSpace& space,
                                               const PolarQuadrature& q,
                                               const Eigen::VectorXd& x);

/// ∫ F φ_i for F given at the nodes.
Eigen::VectorXd project(const DiscreteSpace& space, const NodeTables& t,
                        const std::vector<double>& samples);

}  // namespace itef
