#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <memory>
#include <vector>

#include "hybriddg/basis.hpp"
#include "hybriddg/quadrature.hpp"
#include "hybriddg/types.hpp"

namespace hdg {

// Evaluates one field at the canonical points of a face, E u, and lifts E^T g.
// Hex and tet traces are sparse (line or face-node extraction); wedge and
// pyramid traces are dense.
struct TraceOperator {
  bool dense = false;
  Eigen::MatrixXd D;
  Eigen::SparseMatrix<double, Eigen::RowMajor> S;

  Eigen::Index rows() const { return dense ? D.rows() : S.rows(); }
  void apply(const double* u, Eigen::Index np, double* out) const;
  void lift_add(const double* g, Eigen::Index np, double* r) const;
  Eigen::MatrixXd to_dense() const { return dense ? D : Eigen::MatrixXd(S); }
};

QuadratureRule face_rule(FaceType ft, int N, Flavor flavor);

// Reference-element operators for one (type, degree, flavor).
class ElementOperators {
 public:
  ElementOperators(ElemType type, int N, Flavor flavor);

  ElemType type() const { return type_; }
  int degree() const { return N_; }
  Flavor flavor() const { return flavor_; }
  int size() const { return basis_->size(); }
  int num_faces() const { return static_cast<int>(face_rules_.size()); }
  const Basis& basis() const { return *basis_; }

  FaceType face_type(int f) const;
  const QuadratureRule& face_rule(int f) const { return face_rules_.at(f); }
  // Face parameters of the canonical points as seen from this element's face f
  // when the face is shared with orientation code o.
  const Eigen::MatrixX2d& face_points(int f, int o) const { return face_pts_.at(f).at(o); }
  const TraceOperator& trace(int f, int o) const { return traces_.at(f).at(o); }

  // Points at which element geometry is sampled (carries collapsed coordinates).
  const QuadratureRule& geometry_points() const { return geom_pts_; }

  // hex: 1D Lagrange derivative matrix D1(i,j) = l_j'(x_i) and 1D weights
  Eigen::MatrixXd D1;
  Eigen::VectorXd w1;
  // tet: nodal derivatives, reference mass and inverse, and skew operators Dd^T M
  // pyramid: weak derivatives Dd(test, trial) = int phi_test d_d phi_trial
  Eigen::MatrixXd Dr, Ds, Dt, M, Minv, SrT, SsT, StT;
  // wedge: triangle factor at the triangle rule, line factor at GL points
  Eigen::MatrixXd Vq, Vqr, Vqt, Vl, Vls;
  Eigen::VectorXd wq, wl;

 private:
  void build_traces();
  void build_hex();
  void build_tet();
  void build_wedge();
  void build_pyramid();

  ElemType type_;
  int N_;
  Flavor flavor_;
  std::unique_ptr<Basis> basis_;
  std::vector<QuadratureRule> face_rules_;
  std::vector<std::vector<Eigen::MatrixX2d>> face_pts_;
  std::vector<std::vector<TraceOperator>> traces_;
  QuadratureRule geom_pts_;
};

// Quadrature-free pyramid weak derivative matrices, Dd(test, trial).
void pyramid_weak_derivatives(const PyramidBasis& B, Eigen::MatrixXd& Dr, Eigen::MatrixXd& Ds,
                              Eigen::MatrixXd& Dt);

}  // namespace hdg
