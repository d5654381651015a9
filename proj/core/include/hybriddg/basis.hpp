#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "hybriddg/jacobi.hpp"
#include "hybriddg/quadrature.hpp"
#include "hybriddg/types.hpp"

namespace hdg {

// Node family for quadrilateral faces and hexahedra.
enum class Flavor { gauss, lobatto };

// Values and reference derivatives of every basis function at a set of points.
struct Tabulation {
  Eigen::MatrixXd V, Vr, Vs, Vt;  // npts x Np
};

int basis_size(ElemType type, int N);

class Basis {
 public:
  Basis(ElemType type, int N) : type_(type), N_(N), np_(basis_size(type, N)) {}
  virtual ~Basis() = default;

  ElemType type() const { return type_; }
  int degree() const { return N_; }
  int size() const { return np_; }

  // Points are given in reference (r,s,t); collapsed coordinates are derived
  // internally with the apex/edge limits of `collapse`.
  virtual Tabulation tabulate(const Eigen::MatrixXd& rst) const = 0;
  Eigen::MatrixXd values(const Eigen::MatrixXd& rst) const { return tabulate(rst).V; }

 protected:
  ElemType type_;
  int N_;
  int np_;
};

// Tensor-product Lagrange basis at GL or GLL nodes; node (i,j,k) has index i + n(j + n k).
class HexBasis final : public Basis {
 public:
  HexBasis(int N, Flavor flavor);
  Tabulation tabulate(const Eigen::MatrixXd& rst) const override;

  Flavor flavor() const { return flavor_; }
  const Lagrange1D& line() const { return line_; }
  const Eigen::VectorXd& line_weights() const { return w1d_; }
  Eigen::MatrixXd nodes() const;

 private:
  Flavor flavor_;
  Lagrange1D line_;
  Eigen::VectorXd w1d_;
};

// Orthonormal polynomial basis of P_N on the reference tetrahedron.
class TetModalBasis final : public Basis {
 public:
  explicit TetModalBasis(int N);
  Tabulation tabulate(const Eigen::MatrixXd& rst) const override;
};

// Lagrange basis at warp-and-blend nodes.
class TetNodalBasis final : public Basis {
 public:
  explicit TetNodalBasis(int N);
  Tabulation tabulate(const Eigen::MatrixXd& rst) const override;

  const Eigen::MatrixXd& nodes() const { return nodes_; }
  const std::vector<int>& face_nodes(int face) const { return face_nodes_.at(face); }
  const Eigen::MatrixXd& mass() const { return mass_; }

 private:
  TetModalBasis modal_;
  Eigen::MatrixXd nodes_, vinv_, mass_;
  std::vector<std::vector<int>> face_nodes_;
};

Eigen::MatrixXd tet_warp_blend_nodes(int N);

// Orthonormal triangle basis in (r,t) times orthonormal Legendre in s.
// Index m + Ntri * j with triangle mode m and line mode j.
class WedgeBasis final : public Basis {
 public:
  explicit WedgeBasis(int N);
  Tabulation tabulate(const Eigen::MatrixXd& rst) const override;

  int tri_size() const { return ntri_; }
  int line_size() const { return N_ + 1; }
  // Triangle factor at (r,t) points: values, d/dr, d/dt.
  void tabulate_tri(const Eigen::MatrixX2d& rt, Eigen::MatrixXd& V, Eigen::MatrixXd& Vr,
                    Eigen::MatrixXd& Vt) const;
  void tabulate_line(const Eigen::VectorXd& s, Eigen::MatrixXd& V, Eigen::MatrixXd& Vs) const;

 private:
  int ntri_;
};

// Semi-nodal rational basis: Lagrange in (a,b) at GL(k+1) points on level k,
// Jacobi in c. Orthonormal on the reference pyramid; its mass matrix is diagonal
// in physical space with entries J at the node (a_i^k, b_j^k).
class PyramidBasis final : public Basis {
 public:
  explicit PyramidBasis(int N);
  Tabulation tabulate(const Eigen::MatrixXd& rst) const override;

  struct Index {
    int k, i, j;
  };
  const std::vector<Index>& index() const { return idx_; }
  // (a,b) node of function m; geometric terms are sampled there.
  Eigen::Vector2d node_ab(int m) const;
  const QuadratureRule& level_rule(int k) const { return levels_.at(k); }
  double c_norm(int k) const { return nrm_.at(k); }

  // Factors of the c-direction: ((1-c)/2)^k P_{N-k}^{(2k+3,0)}(c) / nrm_k and its derivative.
  double c_factor(int k, double c) const;
  double c_factor_deriv(int k, double c) const;

 private:
  std::vector<QuadratureRule> levels_;
  std::vector<Lagrange1D> lagr_;
  std::vector<double> nrm_;
  std::vector<Index> idx_;
};

std::unique_ptr<Basis> make_basis(ElemType type, int N, Flavor flavor = Flavor::gauss);

}  // namespace hdg
