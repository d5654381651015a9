#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "hybriddg/dg.hpp"
#include "hybriddg/types.hpp"

namespace hdg {

// full: exact L2 norms. sem: GLL quadrature on quadrilateral faces, and on the
// hexahedral volume.
enum class TraceMode { full, sem };

TraceMode trace_mode(const Formulation& f);

// Face-based closed forms C_T(N) = max_f (C_f(N)/|f|) |dK|. The SEM variant
// multiplies quadrilateral-face contributions by the GLL norm equivalence factor (2+1/N)^2.
double analytic_trace_constant(ElemType type, int N, TraceMode mode = TraceMode::full);
// Largest eigenvalue of M_s v = lambda M v on the reference element (cached).
double computed_trace_constant(ElemType type, int N, TraceMode mode = TraceMode::full);
// Largest eigenvalue of K v = lambda M v; for the hexahedron both matrices use GLL quadrature.
double markov_constant(ElemType type, int N);
// 3(N+1)(N+2)/2 and 3N(N+1)/2.
double hex_exact_trace(int N, TraceMode mode);
// Surface-to-volume ratio of the tensor-product polynomial vanishing at the N
// interior nodes of the (N+2)-point GLL rule.
double extremal_polynomial_check(int N, int d);

// Geometric and material quantities of one element entering the bounds.
struct ElementStability {
  double tau_p = 0.0, tau_u = 0.0;  // face maxima
  double C_rho_kappa = 0.0;         // max(tau_p kappa, tau_u / rho)
  double C_material = 0.0;          // max(kappa, 1/rho)
  double J_max = 0.0, Jinv_max = 0.0, Js_max = 0.0;
  double C_J = 0.0;    // Js_max Jinv_max, or max Js/J for wedges
  double C_rst = 0.0;  // max spectral norm of d(r,s,t)/d(x,y,z)
};

ElementStability element_stability(const Discretization& d, int e);
// Trace constant of the mapped element, from its own surface and volume mass.
double element_trace_constant(const Discretization& d, int e);

// dtau_K = C / (C_rho_kappa C_T(N) C_J).
double local_timestep(const Discretization& d, int e, double cfl);
std::vector<double> local_timesteps(const Discretization& d, double cfl);

struct SpectralBounds {
  double re_element = 0.0;   // computed C_T(N,K) per mapped element
  double re_computed = 0.0;  // computed reference C_T(N)
  double re_analytic = 0.0;  // closed-form C_T(N)
  double im = 0.0;
};
SpectralBounds spectral_bounds(const Discretization& d, bool with_element_constants = true);

struct Spectrum {
  std::vector<std::complex<double>> eigenvalues;  // of M^{-1} A (empty unless requested)
  double rho = 0.0;       // spectral radius of M^{-1} A
  double max_real = 0.0;  // max Re(lambda) of M^{-1} A
  double max_abs_real = 0.0;
  double rho_sym = 0.0;   // rho(M^{-1} A^s)
  double rho_skew = 0.0;  // rho(M^{-1} A^k)
  double sym_max = 0.0;   // lambda_max(M^{-1} A^s), bounds Re(lambda) from above
  double sym_min = 0.0;
};
// Dense generalized eigenanalysis through the Cholesky factor of the mass matrix.
Spectrum compute_spectrum(const Discretization& d, bool full_eigenvalues = true,
                          Eigen::Index max_dofs = 20000);

}  // namespace hdg
