#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "hybriddg/quadrature.hpp"
#include "hybriddg/types.hpp"

namespace hdg {

// A reference face lists its vertices counter-clockwise seen from outside.
// Face parameter (xi, eta) in [-1,1]^2 (quad) or the reference triangle (tri)
// maps to V0 + (1+xi)/2 (V1-V0) + (1+eta)/2 (Vlast-V0).
struct RefFace {
  FaceType type = FaceType::quad;
  int nv = 4;
  std::array<int, 4> v{};
  double param_scale = 1.0;  // reference face measure per unit parameter measure
  Vec3 normal;               // outward unit normal
};

struct ReferenceElement {
  ElemType type;
  std::vector<Vec3> vertices;
  std::vector<RefFace> faces;
  double volume = 0.0;
  double surface_area = 0.0;
};

const ReferenceElement& reference_element(ElemType type);

// Collapsed (a,b,c) -> reference (r,s,t), and its inverse. The inverse uses the
// a = -1 / b = -1 limits on the singular edges and the apex.
Vec3 duffy_map(ElemType type, const Vec3& abc);
Vec3 collapse(ElemType type, const Vec3& rst);

// Vertex functions at collapsed coordinates; they sum to one. Pyramid functions are
// the trilinear hex functions composed with the inverse collapse, so the apex
// (c = 1) is well defined for any (a,b).
Eigen::VectorXd vertex_shape_functions(ElemType type, const Vec3& abc);
// Face parameter -> reference coordinates of the element.
Vec3 face_to_reference(ElemType type, int face, double xi, double eta);
// Weights of the face vertices at a parameter point (barycentric or bilinear).
std::array<double, 4> face_vertex_weights(FaceType ft, double xi, double eta);
Eigen::Vector2d face_vertex_param(FaceType ft, int i);

// Orientation of a shared face. Code `o` encodes the permutation sigma with
// (this side's local vertex sigma(i)) == (owner's local vertex i).
int num_orientations(FaceType ft);
std::array<int, 4> orientation_permutation(FaceType ft, int code);
int orientation_code(FaceType ft, const std::array<int, 4>& sigma);  // -1 if invalid
int inverse_orientation(FaceType ft, int code);
// Owner parameter point -> this side's parameter point.
Eigen::Vector2d orient_face_point(FaceType ft, int code, double xi, double eta);

// Vertex-based geometric map of one element.
class ElementMap {
 public:
  ElementMap(ElemType type, Eigen::Matrix3Xd vertices);

  ElemType type() const { return type_; }
  const Eigen::Matrix3Xd& vertices() const { return v_; }

  // All evaluations take collapsed coordinates so pyramid and tet singular
  // points are handled by the caller's choice of (a,b,c).
  Vec3 point(const Vec3& abc) const;
  Mat3 jacobian(const Vec3& abc) const;  // columns dx/dr, dx/ds, dx/dt
  double det(const Vec3& abc) const { return jacobian(abc).determinant(); }
  // Gradient of det(J) in reference coordinates; polynomial maps only.
  Vec3 det_gradient_rst(const Vec3& abc) const;
  Vec3 centroid() const;

 private:
  ElemType type_;
  Eigen::Matrix3Xd v_;
};

struct FaceGeometry {
  Eigen::Matrix3Xd x;       // physical points
  Eigen::Matrix3Xd normal;  // outward unit normal
  Eigen::VectorXd Js;       // physical / reference face measure
  Eigen::VectorXd dA;       // physical measure per unit parameter measure
};

struct GeometricFactors {
  Eigen::VectorXd J;                            // at volume points
  Eigen::Matrix<double, 9, Eigen::Dynamic> G;   // entry 3*d+c holds d r_d / d x_c
  Eigen::Matrix3Xd x;                           // physical volume points
  std::vector<FaceGeometry> faces;
};

FaceGeometry face_geometry(const ElementMap& map, int face, const Eigen::MatrixX2d& params);

// Volume factors at the points of `vol` (which must carry collapsed coordinates)
// and face factors at the parameter points `face_params[f]`.
GeometricFactors build_geometric_factors(const ElementMap& map, const QuadratureRule& vol,
                                         const std::vector<Eigen::MatrixX2d>& face_params);

}  // namespace hdg
