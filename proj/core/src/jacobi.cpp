#include "hybriddg/jacobi.hpp"

#include <cmath>
#include <stdexcept>

namespace hdg {

double jacobi_p(int n, double alpha, double beta, double x) {
  if (n < 0) return 0.0;
  const double ab = alpha + beta;
  const double gamma0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                                 std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
  double p0 = 1.0 / std::sqrt(gamma0);
  if (n == 0) return p0;
  const double gamma1 = (alpha + 1.0) * (beta + 1.0) / (ab + 3.0) * gamma0;
  double p1 = ((ab + 2.0) * x / 2.0 + (alpha - beta) / 2.0) / std::sqrt(gamma1);
  double aold = 2.0 / (2.0 + ab) * std::sqrt((alpha + 1.0) * (beta + 1.0) / (ab + 3.0));
  for (int i = 1; i < n; ++i) {
    const double h1 = 2.0 * i + ab;
    const double anew = 2.0 / (h1 + 2.0) *
                        std::sqrt((i + 1.0) * (i + 1.0 + ab) * (i + 1.0 + alpha) * (i + 1.0 + beta) /
                                  (h1 + 1.0) / (h1 + 3.0));
    const double bnew = -(alpha * alpha - beta * beta) / h1 / (h1 + 2.0);
    const double p2 = (-aold * p0 + (x - bnew) * p1) / anew;
    p0 = p1;
    p1 = p2;
    aold = anew;
  }
  return p1;
}

double jacobi_p_deriv(int n, double alpha, double beta, double x) {
  if (n <= 0) return 0.0;
  return std::sqrt(n * (n + alpha + beta + 1.0)) * jacobi_p(n - 1, alpha + 1.0, beta + 1.0, x);
}

Eigen::VectorXd jacobi_p(int n, double alpha, double beta, const Eigen::VectorXd& x) {
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = jacobi_p(n, alpha, beta, x(i));
  return out;
}

Lagrange1D::Lagrange1D(Eigen::VectorXd nodes) : x_(std::move(nodes)), w_(x_.size()) {
  const Eigen::Index n = x_.size();
  if (n < 1) throw std::invalid_argument("Lagrange1D: empty node set");
  for (Eigen::Index j = 0; j < n; ++j) {
    double p = 1.0;
    for (Eigen::Index k = 0; k < n; ++k)
      if (k != j) p *= (x_(j) - x_(k));
    w_(j) = 1.0 / p;
  }
}

Eigen::VectorXd Lagrange1D::values(double x) const {
  const Eigen::Index n = x_.size();
  Eigen::VectorXd l(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double p = w_(j);
    for (Eigen::Index k = 0; k < n; ++k)
      if (k != j) p *= (x - x_(k));
    l(j) = p;
  }
  return l;
}

Eigen::VectorXd Lagrange1D::derivatives(double x) const {
  const Eigen::Index n = x_.size();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double sum = 0.0;
    for (Eigen::Index m = 0; m < n; ++m) {
      if (m == j) continue;
      double p = 1.0;
      for (Eigen::Index k = 0; k < n; ++k)
        if (k != j && k != m) p *= (x - x_(k));
      sum += p;
    }
    d(j) = w_(j) * sum;
  }
  return d;
}

Eigen::MatrixXd Lagrange1D::diff_matrix() const {
  const Eigen::Index n = x_.size();
  Eigen::MatrixXd D(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double diag = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      D(i, j) = (w_(j) / w_(i)) / (x_(i) - x_(j));
      diag -= D(i, j);
    }
    D(i, i) = diag;
  }
  return D;
}

}  // namespace hdg
