#include "hybriddg/stability.hpp"

#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "hybriddg/basis.hpp"
#include "hybriddg/quadrature.hpp"
#include "hybriddg/refelem.hpp"

namespace hdg {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double max_generalized_eigenvalue(const MatrixXd& A, const MatrixXd& B) {
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(A, B, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw std::runtime_error("generalized eigensolver failed");
  return es.eigenvalues().maxCoeff();
}

QuadratureRule gll_cube(int n) {
  const QuadratureRule g = gauss_lobatto_1d(n);
  QuadratureRule q;
  q.points.resize(n * n * n, 3);
  q.weights.resize(n * n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int m = i + n * (j + n * k);
        q.points.row(m) << g.points(i, 0), g.points(j, 0), g.points(k, 0);
        q.weights(m) = g.weights(i) * g.weights(j) * g.weights(k);
      }
  q.exactness = 2 * n - 3;
  q.convention = DegreeConvention::per_direction;
  return q;
}

MatrixXd weighted_gram(const MatrixXd& V, const VectorXd& w) { return V.transpose() * w.asDiagonal() * V; }

MatrixXd reference_surface_mass(const Basis& basis, ElemType type, int N, TraceMode mode) {
  const ReferenceElement& ref = reference_element(type);
  MatrixXd Ms = MatrixXd::Zero(basis.size(), basis.size());
  for (std::size_t f = 0; f < ref.faces.size(); ++f) {
    const RefFace& rf = ref.faces[f];
    QuadratureRule q;
    if (rf.type == FaceType::tri)
      q = triangle_rule(N + 1);
    else
      q = mode == TraceMode::sem ? quad_rule(N + 1, true) : quad_rule(N + 2, false);
    MatrixXd rst(q.size(), 3);
    for (Eigen::Index i = 0; i < q.size(); ++i)
      rst.row(i) = face_to_reference(type, static_cast<int>(f), q.points(i, 0), q.points(i, 1)).transpose();
    Ms += weighted_gram(basis.values(rst), rf.param_scale * q.weights);
  }
  return Ms;
}

template <class F>
double cached(std::tuple<int, int, int> key, F&& compute) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, double> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const double v = compute();
  std::lock_guard<std::mutex> lock(mu);
  cache[key] = v;
  return v;
}

void check_degree(int N) {
  if (N < 1) throw std::invalid_argument("polynomial degree must be at least 1");
}

}  // namespace

TraceMode trace_mode(const Formulation& f) {
  return f.flavor() == Flavor::lobatto ? TraceMode::sem : TraceMode::full;
}

double analytic_trace_constant(ElemType type, int N, TraceMode mode) {
  check_degree(N);
  const double n1 = N + 1.0;
  double c = 0.0;
  switch (type) {
    case ElemType::hex: c = 4.0 * n1 * n1; break;
    case ElemType::wedge: c = (std::sqrt(2.0) + 3.0) * n1 * (N + 2.0); break;
    case ElemType::pyramid: c = (std::sqrt(2.0) + 2.0) * n1 * (N + 3.0); break;
    case ElemType::tet: c = (std::sqrt(3.0) + 3.0) * n1 * (N + 3.0) / 2.0; break;
  }
  // quadrilateral faces dominate the maximum for every type that has them
  if (mode == TraceMode::sem && type != ElemType::tet) {
    const double g = 2.0 + 1.0 / N;
    c *= g * g;
  }
  return c;
}

double computed_trace_constant(ElemType type, int N, TraceMode mode) {
  check_degree(N);
  if (type == ElemType::tet) mode = TraceMode::full;
  return cached({static_cast<int>(type), N, static_cast<int>(mode)}, [&] {
    const auto basis = make_basis(type, N, Flavor::gauss);
    const QuadratureRule vol =
        (type == ElemType::hex && mode == TraceMode::sem) ? gll_cube(N + 1) : collapsed_rule(type, N + 2);
    const MatrixXd M = weighted_gram(basis->values(vol.points), vol.weights);
    return max_generalized_eigenvalue(reference_surface_mass(*basis, type, N, mode), M);
  });
}

double markov_constant(ElemType type, int N) {
  check_degree(N);
  return cached({static_cast<int>(type), N, 2}, [&] {
    const auto basis = make_basis(type, N, Flavor::gauss);
    // the hexahedron uses GLL quadrature for both matrices, so K is the SEM stiffness
    const QuadratureRule kr = type == ElemType::hex ? gll_cube(N + 1)
                                                    : collapsed_rule(type, N + (type == ElemType::pyramid ? 4 : 3));
    const Tabulation T = basis->tabulate(kr.points);
    const MatrixXd K = weighted_gram(T.Vr, kr.weights) + weighted_gram(T.Vs, kr.weights) +
                       weighted_gram(T.Vt, kr.weights);
    const MatrixXd M = weighted_gram(T.V, kr.weights);
    return max_generalized_eigenvalue(K, M);
  });
}

double hex_exact_trace(int N, TraceMode mode) {
  check_degree(N);
  return mode == TraceMode::full ? 1.5 * (N + 1.0) * (N + 2.0) : 1.5 * N * (N + 1.0);
}

double extremal_polynomial_check(int N, int d) {
  check_degree(N);
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  const QuadratureRule gll = gauss_lobatto_1d(N + 2);
  auto u = [&](double x) {
    double v = 1.0;
    for (int i = 1; i <= N; ++i) v *= x - gll.points(i, 0);
    return v;
  };
  // integrate u^2 (degree 2N) with an independent Gauss rule
  const QuadratureRule gl = gauss_legendre_1d(N + 1);
  double vol1 = 0.0;
  for (Eigen::Index i = 0; i < gl.size(); ++i) vol1 += gl.weights(i) * std::pow(u(gl.points(i, 0)), 2);
  const double end2 = u(1.0) * u(1.0), start2 = u(-1.0) * u(-1.0);
  // each of the 2d faces fixes one coordinate at +-1
  const double volume = std::pow(vol1, d);
  const double surface = d * (start2 + end2) * std::pow(vol1, d - 1);
  return surface / volume;
}

ElementStability element_stability(const Discretization& d, int e) {
  const HybridMesh& mesh = d.mesh();
  const ElemType type = mesh.elements.at(e).type;
  const ElementOperators& ops = d.ops(type);
  const ElementMap map = mesh.element_map(e);
  std::vector<Eigen::MatrixX2d> params;
  for (int f = 0; f < ops.num_faces(); ++f) params.push_back(ops.face_rule(f).points);
  const GeometricFactors gf = build_geometric_factors(map, element_rule(type, d.degree()), params);

  ElementStability s;
  const Material& mat = mesh.material(e);
  for (int f = 0; f < ops.num_faces(); ++f) {
    s.tau_p = std::max(s.tau_p, d.tau_p(e, f));
    s.tau_u = std::max(s.tau_u, d.tau_u(e, f));
  }
  s.C_rho_kappa = std::max(s.tau_p * mat.kappa, s.tau_u / mat.rho);
  s.C_material = std::max(mat.kappa, 1.0 / mat.rho);
  s.J_max = gf.J.maxCoeff();
  s.Jinv_max = 1.0 / gf.J.minCoeff();
  for (Eigen::Index q = 0; q < gf.G.cols(); ++q) {
    const Eigen::Map<const Mat3> G(gf.G.col(q).data());
    s.C_rst = std::max(s.C_rst, G.jacobiSvd().singularValues()(0));
  }
  double ratio = 0.0;
  for (int f = 0; f < ops.num_faces(); ++f) {
    const FaceGeometry& fg = gf.faces[f];
    s.Js_max = std::max(s.Js_max, fg.Js.maxCoeff());
    if (type == ElemType::wedge)
      for (Eigen::Index q = 0; q < fg.Js.size(); ++q) {
        const Vec3 rst = face_to_reference(type, f, params[f](q, 0), params[f](q, 1));
        ratio = std::max(ratio, fg.Js(q) / map.det(collapse(type, rst)));
      }
  }
  s.C_J = type == ElemType::wedge ? ratio : s.Js_max * s.Jinv_max;
  return s;
}

double element_trace_constant(const Discretization& d, int e) {
  return max_generalized_eigenvalue(d.element_surface_mass(e), d.element_mass(e));
}

double local_timestep(const Discretization& d, int e, double cfl) {
  const ElementStability s = element_stability(d, e);
  const double CT = computed_trace_constant(d.mesh().elements[e].type, d.degree(), trace_mode(d.formulation()));
  return cfl / (s.C_rho_kappa * CT * s.C_J);
}

std::vector<double> local_timesteps(const Discretization& d, double cfl) {
  std::vector<double> dt(d.num_elements());
  for (int e = 0; e < d.num_elements(); ++e) dt[e] = local_timestep(d, e, cfl);
  return dt;
}

SpectralBounds spectral_bounds(const Discretization& d, bool with_element_constants) {
  SpectralBounds b;
  const TraceMode mode = trace_mode(d.formulation());
  const int N = d.degree();
  for (int e = 0; e < d.num_elements(); ++e) {
    const ElemType type = d.mesh().elements[e].type;
    const ElementStability s = element_stability(d, e);
    const double CT = computed_trace_constant(type, N, mode);
    b.re_computed = std::max(b.re_computed, s.C_rho_kappa * CT * s.C_J);
    b.re_analytic = std::max(b.re_analytic, s.C_rho_kappa * analytic_trace_constant(type, N, mode) * s.C_J);
    if (with_element_constants)
      b.re_element = std::max(b.re_element, s.C_rho_kappa * element_trace_constant(d, e));
    const double CM = markov_constant(type, N) * s.C_rst * s.C_rst * s.J_max * s.Jinv_max;
    b.im = std::max(b.im, s.C_material * (std::sqrt(CM) + CT * s.C_J));
  }
  return b;
}

namespace {

// Largest and smallest eigenvalue of a symmetric matrix (overwritten).
std::pair<double, double> symmetric_extremes(MatrixXd& S) {
  const lapack_int n = static_cast<lapack_int>(S.rows());
  VectorXd w(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n, S.data(), n, w.data());
  if (info != 0) throw std::runtime_error("dsyevd failed");
  return {w.maxCoeff(), w.minCoeff()};
}

}  // namespace

Spectrum compute_spectrum(const Discretization& d, bool full_eigenvalues, Eigen::Index max_dofs) {
  MatrixXd B = d.assemble_residual(max_dofs);
  const Eigen::Index n = B.rows();
  // B <- L^{-1} A L^{-T} with M = L L^T block diagonal
  const auto blocks = d.state_mass_blocks();
  std::vector<Eigen::LLT<MatrixXd>> chol;
  chol.reserve(blocks.size());
  for (const auto& Mb : blocks) {
    chol.emplace_back(Mb);
    if (chol.back().info() != Eigen::Success) throw std::runtime_error("mass block is not positive definite");
  }
  for (int e = 0; e < d.num_elements(); ++e) {
    const Eigen::Index o = d.offset(e), m = blocks[e].rows();
    chol[e].matrixL().solveInPlace(B.middleRows(o, m));
  }
  for (int e = 0; e < d.num_elements(); ++e) {
    const Eigen::Index o = d.offset(e), m = blocks[e].rows();
    MatrixXd cols = B.middleCols(o, m).transpose();
    chol[e].matrixL().solveInPlace(cols);
    B.middleCols(o, m) = cols.transpose();
  }

  Spectrum sp;
  MatrixXd S = 0.5 * (B + B.transpose());
  std::tie(sp.sym_max, sp.sym_min) = symmetric_extremes(S);
  sp.rho_sym = std::max(std::abs(sp.sym_max), std::abs(sp.sym_min));
  {
    const MatrixXd K = 0.5 * (B - B.transpose());
    MatrixXd KtK = K.transpose() * K;
    sp.rho_skew = std::sqrt(std::max(0.0, symmetric_extremes(KtK).first));
  }
  if (full_eigenvalues) {
    VectorXd wr(n), wi(n);
    const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', static_cast<lapack_int>(n), B.data(),
                                          static_cast<lapack_int>(n), wr.data(), wi.data(), nullptr, 1, nullptr, 1);
    if (info != 0) throw std::runtime_error("dgeev failed");
    sp.eigenvalues.resize(n);
    sp.max_real = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      sp.eigenvalues[i] = {wr(i), wi(i)};
      sp.rho = std::max(sp.rho, std::abs(sp.eigenvalues[i]));
      sp.max_real = std::max(sp.max_real, wr(i));
      sp.max_abs_real = std::max(sp.max_abs_real, std::abs(wr(i)));
    }
  }
  return sp;
}

}  // namespace hdg
