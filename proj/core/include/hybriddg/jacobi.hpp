#pragma once

#include <Eigen/Core>

namespace hdg {

// Orthonormal Jacobi polynomials: int (1-x)^alpha (1+x)^beta P_n^2 dx = 1.
double jacobi_p(int n, double alpha, double beta, double x);
double jacobi_p_deriv(int n, double alpha, double beta, double x);
Eigen::VectorXd jacobi_p(int n, double alpha, double beta, const Eigen::VectorXd& x);

// 1D Lagrange interpolation on distinct nodes.
class Lagrange1D {
 public:
  explicit Lagrange1D(Eigen::VectorXd nodes);
  int size() const { return static_cast<int>(x_.size()); }
  const Eigen::VectorXd& nodes() const { return x_; }
  Eigen::VectorXd values(double x) const;
  Eigen::VectorXd derivatives(double x) const;
  // D(i,j) = l_j'(x_i)
  Eigen::MatrixXd diff_matrix() const;

 private:
  Eigen::VectorXd x_, w_;  // nodes and barycentric weights
};

}  // namespace hdg
