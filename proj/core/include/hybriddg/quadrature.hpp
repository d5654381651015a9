#pragma once

#include <Eigen/Core>

#include "hybriddg/types.hpp"

namespace hdg {

// How `exactness` is counted. Tensor rules (hex, and the wedge in its triangle and
// extrusion factors separately) are exact per direction; simplex and pyramid rules
// are exact for total degree.
enum class DegreeConvention { total, per_direction };

struct QuadratureRule {
  Eigen::MatrixXd points;     // npts x dim
  Eigen::VectorXd weights;
  Eigen::MatrixXd collapsed;  // npts x 3, collapsed (a,b,c) coordinates; empty for 1D/2D rules
  int exactness = 0;
  DegreeConvention convention = DegreeConvention::total;

  Eigen::Index size() const { return weights.size(); }
  int dim() const { return static_cast<int>(points.cols()); }
};

// Gauss-Jacobi rule for the weight (1-x)^alpha (1+x)^beta on [-1,1], n points.
QuadratureRule gauss_jacobi_1d(double alpha, double beta, int n);
QuadratureRule gauss_legendre_1d(int n);
// Gauss-Lobatto-Legendre, n >= 2 points including both endpoints.
QuadratureRule gauss_lobatto_1d(int n);

// Collapsed-coordinate rule on the reference triangle {r,s >= -1, r+s <= 0},
// exact for total degree 2N+1.
QuadratureRule triangle_rule(int N);
QuadratureRule quad_rule(int n, bool lobatto);

// Volume rule with n points per collapsed direction.
QuadratureRule collapsed_rule(ElemType type, int n);
// Default volume rule for degree N (N+1 points per direction).
QuadratureRule element_rule(ElemType type, int N);

double reference_volume(ElemType type);

// Legendre polynomial with P_n(1) = 1.
double legendre(int n, double x);

}  // namespace hdg
