#include "hybriddg/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "hybriddg/refelem.hpp"

namespace hdg {

namespace {

void symmetrize(QuadratureRule& q) {
  const Eigen::Index n = q.size();
  for (Eigen::Index i = 0; i < n / 2; ++i) {
    const Eigen::Index j = n - 1 - i;
    const double x = 0.5 * (q.points(j, 0) - q.points(i, 0));
    const double w = 0.5 * (q.weights(i) + q.weights(j));
    q.points(i, 0) = -x;
    q.points(j, 0) = x;
    q.weights(i) = q.weights(j) = w;
  }
  if (n % 2 == 1) q.points(n / 2, 0) = 0.0;
}

}  // namespace

double legendre(int n, double x) {
  if (n == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 1; k < n; ++k) {
    const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// Golub-Welsch on the Jacobi matrix of the monic recurrence.
QuadratureRule gauss_jacobi_1d(double alpha, double beta, int n) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi_1d: need at least one point");
  if (!(alpha > -1.0) || !(beta > -1.0))
    throw std::invalid_argument("gauss_jacobi_1d: exponents must be > -1");
  const double ab = alpha + beta;
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
  diag(0) = (beta - alpha) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    const double t = 2.0 * k + ab;
    diag(k) = (beta * beta - alpha * alpha) / (t * (t + 2.0));
    double bk;
    if (k == 1)
      bk = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    else
      bk = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (t * t * (t + 1.0) * (t - 1.0));
    sub(k - 1) = std::sqrt(bk);
  }
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                              std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));

  QuadratureRule q;
  q.points.resize(n, 1);
  q.weights.resize(n);
  if (n == 1) {
    q.points(0, 0) = diag(0);
    q.weights(0) = mu0;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
    for (int i = 0; i < n; ++i) {
      q.points(i, 0) = es.eigenvalues()(i);
      const double v0 = es.eigenvectors()(0, i);
      q.weights(i) = mu0 * v0 * v0;
    }
  }
  q.exactness = 2 * n - 1;
  q.convention = DegreeConvention::per_direction;
  if (alpha == beta) symmetrize(q);
  return q;
}

QuadratureRule gauss_legendre_1d(int n) { return gauss_jacobi_1d(0.0, 0.0, n); }

QuadratureRule gauss_lobatto_1d(int n) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto_1d: need at least two points");
  QuadratureRule q;
  q.points.resize(n, 1);
  q.weights.resize(n);
  q.points(0, 0) = -1.0;
  q.points(n - 1, 0) = 1.0;
  if (n > 2) {
    const QuadratureRule inner = gauss_jacobi_1d(1.0, 1.0, n - 2);
    q.points.block(1, 0, n - 2, 1) = inner.points;
  }
  const double scale = 2.0 / (n * (n - 1.0));
  for (int i = 0; i < n; ++i) {
    const double p = legendre(n - 1, q.points(i, 0));
    q.weights(i) = scale / (p * p);
  }
  q.exactness = 2 * n - 3;
  q.convention = DegreeConvention::per_direction;
  symmetrize(q);
  return q;
}

QuadratureRule triangle_rule(int N) {
  if (N < 0) throw std::invalid_argument("triangle_rule: negative degree");
  const int n = N + 1;
  const QuadratureRule ga = gauss_legendre_1d(n);
  const QuadratureRule gb = gauss_jacobi_1d(1.0, 0.0, n);
  QuadratureRule q;
  q.points.resize(n * n, 2);
  q.weights.resize(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int m = i + n * j;
      const double a = ga.points(i, 0), b = gb.points(j, 0);
      q.points(m, 0) = 0.5 * (1.0 + a) * (1.0 - b) - 1.0;
      q.points(m, 1) = b;
      q.weights(m) = 0.5 * ga.weights(i) * gb.weights(j);
    }
  q.exactness = 2 * N + 1;
  q.convention = DegreeConvention::total;
  return q;
}

QuadratureRule quad_rule(int n, bool lobatto) {
  const QuadratureRule g = lobatto ? gauss_lobatto_1d(n) : gauss_legendre_1d(n);
  QuadratureRule q;
  q.points.resize(n * n, 2);
  q.weights.resize(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int m = i + n * j;
      q.points(m, 0) = g.points(i, 0);
      q.points(m, 1) = g.points(j, 0);
      q.weights(m) = g.weights(i) * g.weights(j);
    }
  q.exactness = g.exactness;
  q.convention = DegreeConvention::per_direction;
  return q;
}

QuadratureRule collapsed_rule(ElemType type, int n) {
  if (n < 1) throw std::invalid_argument("collapsed_rule: need at least one point per direction");
  const QuadratureRule gl = gauss_legendre_1d(n);
  QuadratureRule q;
  q.points.resize(n * n * n, 3);
  q.collapsed.resize(n * n * n, 3);
  q.weights.resize(n * n * n);
  q.exactness = 2 * n - 1;

  // Third collapsed direction carries the Duffy weight where present.
  QuadratureRule qb = gl, qc = gl;
  double wscale = 1.0;
  switch (type) {
    case ElemType::hex:
      q.convention = DegreeConvention::per_direction;
      break;
    case ElemType::wedge:
      // (a,c) form the triangle in (r,t); b is the extrusion direction s
      qc = gauss_jacobi_1d(1.0, 0.0, n);
      wscale = 0.5;
      q.convention = DegreeConvention::per_direction;
      break;
    case ElemType::pyramid:
      qc = gauss_jacobi_1d(2.0, 0.0, n);
      wscale = 0.25;
      q.convention = DegreeConvention::total;
      break;
    case ElemType::tet:
      qb = gauss_jacobi_1d(1.0, 0.0, n);
      qc = gauss_jacobi_1d(2.0, 0.0, n);
      wscale = 0.125;
      q.convention = DegreeConvention::total;
      break;
  }
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        int m = i + n * (j + n * k);
        // wedge ordering: triangle point (i,k) fastest, extrusion index j slowest
        if (type == ElemType::wedge) m = (i + n * k) + n * n * j;
        const Vec3 abc(gl.points(i, 0), qb.points(j, 0), qc.points(k, 0));
        q.collapsed.row(m) = abc.transpose();
        q.points.row(m) = duffy_map(type, abc).transpose();
        q.weights(m) = wscale * gl.weights(i) * qb.weights(j) * qc.weights(k);
      }
  return q;
}

QuadratureRule element_rule(ElemType type, int N) { return collapsed_rule(type, N + 1); }

double reference_volume(ElemType type) {
  switch (type) {
    case ElemType::hex: return 8.0;
    case ElemType::wedge: return 4.0;
    case ElemType::pyramid: return 8.0 / 3.0;
    case ElemType::tet: return 4.0 / 3.0;
  }
  return 0.0;
}

}  // namespace hdg
