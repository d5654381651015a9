#pragma once

#include <Eigen/Core>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hybriddg/mesh.hpp"
#include "hybriddg/operators.hpp"

namespace hdg {

enum class Form { strong, skew };

// GL (Gauss nodes/faces everywhere) or SEM (Lobatto nodes and Lobatto quad faces).
// The volume form per element type is fixed:
//   tet strong, hex strong, wedge skew, pyramid strong (GL) / skew (SEM).
class Formulation {
 public:
  static Formulation gl() { return Formulation(Flavor::gauss); }
  static Formulation sem() { return Formulation(Flavor::lobatto); }
  static Formulation from_string(const std::string& s);

  Flavor flavor() const { return flavor_; }
  Form form(ElemType t) const;
  std::string name() const { return flavor_ == Flavor::gauss ? "GL" : "SEM"; }

 private:
  explicit Formulation(Flavor f) : flavor_(f) {}
  Flavor flavor_;
};

// tau_p = 1/avg(rho c), tau_u = avg(rho c) across a face.
struct Penalties {
  double tau_p = 1.0, tau_u = 1.0;
};
Penalties flux_penalties(const Material& minus, const Material& plus);

// Variants used only for analysis: every element in skew form, or scaled penalties.
struct AnalysisOptions {
  bool all_skew = false;
  double penalty_scale = 1.0;
};

struct FieldValue {
  double p = 0.0;
  Vec3 u = Vec3::Zero();
};
using FieldFunction = std::function<FieldValue(const Vec3&)>;

class Discretization {
 public:
  Discretization(const HybridMesh& mesh, int N, Formulation form, AnalysisOptions opt = {});

  const HybridMesh& mesh() const { return mesh_; }
  int degree() const { return N_; }
  const Formulation& formulation() const { return form_; }
  const AnalysisOptions& options() const { return opt_; }
  const ElementOperators& ops(ElemType t) const;
  Form element_form(int e) const;

  Eigen::Index num_dofs() const { return ndof_; }
  int num_elements() const { return mesh_.size(); }
  // State layout per element: [p, u1, u2, u3], each of length np(e).
  Eigen::Index offset(int e) const { return elems_[e].offset; }
  int np(int e) const { return elems_[e].np; }
  const std::vector<int>& neighbors(int e) const { return elems_[e].nbrs; }

  // R = A U (residual before the mass and material scaling).
  void residual(const Eigen::VectorXd& U, Eigen::VectorXd& R) const;
  // dU = M^{-1} A U.
  void rhs(const Eigen::VectorXd& U, Eigen::VectorXd& dU) const;
  // dU restricted to `elems`; reads U only on those elements and their neighbours.
  void rhs(const Eigen::VectorXd& U, const std::vector<int>& elems, Eigen::VectorXd& dU) const;

  // Dense global operators; refuse above `max_dofs`.
  Eigen::MatrixXd assemble_residual(Eigen::Index max_dofs = 20000) const;
  // Element mass M_K (np x np) and the material-weighted block mass of the state.
  Eigen::MatrixXd element_mass(int e) const;
  Eigen::MatrixXd element_surface_mass(int e) const;
  Eigen::VectorXd apply_mass(const Eigen::VectorXd& U) const;
  std::vector<Eigen::MatrixXd> state_mass_blocks() const;
  double energy(const Eigen::VectorXd& U) const;

  Eigen::VectorXd project(const FieldFunction& f) const;
  // sqrt(sum_K int (p_h - p)^2) and the same for velocity, over-integrated.
  struct Error {
    double p = 0.0, u = 0.0;
  };
  Error l2_error(const Eigen::VectorXd& U, const FieldFunction& exact) const;
  // Field values at arbitrary reference points of element e.
  Eigen::MatrixXd evaluate(int e, const Eigen::VectorXd& U, const Eigen::MatrixXd& rst) const;

  // Penalties on each local face of e.
  double tau_p(int e, int f) const;
  double tau_u(int e, int f) const;

 private:
  struct Slot {
    int orient = 0;
    Eigen::Index trace_offset = 0;
    int nfq = 0;
    int shared = -1;  // index into faces_
    bool owner = true;
    int nbr = -1, nbr_face = -1;
  };
  struct Element {
    ElemType type;
    int np = 0;
    Eigen::Index offset = 0;
    double rho = 1.0, kappa = 1.0;
    Form form = Form::strong;
    const ElementOperators* ops = nullptr;
    Eigen::VectorXd J, wJ;
    Eigen::Matrix<double, 9, Eigen::Dynamic> G;  // hex: w J G, pyramid: J G, wedge: w G, tet: G
    Eigen::Matrix3Xd lsc;                        // wedge: w grad(J) / (2J)
    std::vector<Eigen::VectorXd> face_isqrtJ;    // wedge
    std::vector<Slot> slots;
    std::vector<int> nbrs;
  };
  struct SharedFace {
    Eigen::VectorXd wJs;
    Eigen::Matrix3Xd n;  // owner's outward normal
  };

  void setup_element(int e);
  void compute_traces(int e, const Eigen::VectorXd& U) const;
  void element_residual(int e, const Eigen::VectorXd& U, double* r) const;
  void volume_hex(const Element& el, const double* u, double* r) const;
  void volume_tet(const Element& el, const double* u, double* r) const;
  void volume_wedge(const Element& el, const double* u, double* r) const;
  void volume_pyramid(const Element& el, const double* u, double* r) const;
  void apply_mass_inverse(const Element& el, double* r) const;
  Eigen::VectorXd solution_at(const Element& el, int e, const double* u, const Eigen::MatrixXd& Vals,
                              const Eigen::VectorXd& Jq) const;

  const HybridMesh& mesh_;
  int N_;
  Formulation form_;
  AnalysisOptions opt_;
  std::map<ElemType, std::unique_ptr<ElementOperators>> ops_;
  std::vector<Element> elems_;
  std::vector<SharedFace> faces_;
  Eigen::Index ndof_ = 0;
  Eigen::Index ntrace_ = 0;
  mutable std::vector<double> trace_;
  mutable std::vector<double> work_;
};

}  // namespace hdg
