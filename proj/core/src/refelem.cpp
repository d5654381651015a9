#include "hybriddg/refelem.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hdg {

std::string to_string(ElemType t) {
  switch (t) {
    case ElemType::hex: return "hex";
    case ElemType::wedge: return "wedge";
    case ElemType::pyramid: return "pyramid";
    case ElemType::tet: return "tet";
  }
  return "?";
}

ElemType elem_type_from_string(const std::string& s) {
  if (s == "hex" || s == "hexahedron") return ElemType::hex;
  if (s == "wedge" || s == "prism") return ElemType::wedge;
  if (s == "pyramid" || s == "pyr") return ElemType::pyramid;
  if (s == "tet" || s == "tetrahedron") return ElemType::tet;
  throw std::invalid_argument("unknown element type '" + s + "'");
}

int num_vertices(ElemType t) {
  switch (t) {
    case ElemType::hex: return 8;
    case ElemType::wedge: return 6;
    case ElemType::pyramid: return 5;
    case ElemType::tet: return 4;
  }
  return 0;
}

int num_faces(ElemType t) {
  switch (t) {
    case ElemType::hex: return 6;
    case ElemType::wedge: return 5;
    case ElemType::pyramid: return 5;
    case ElemType::tet: return 4;
  }
  return 0;
}

namespace {

ReferenceElement make_reference(ElemType type, std::vector<Vec3> verts,
                                const std::vector<std::vector<int>>& faces) {
  ReferenceElement e;
  e.type = type;
  e.vertices = std::move(verts);
  e.volume = reference_volume(type);
  for (const auto& fv : faces) {
    RefFace f;
    f.nv = static_cast<int>(fv.size());
    f.type = f.nv == 3 ? FaceType::tri : FaceType::quad;
    for (int i = 0; i < f.nv; ++i) f.v[i] = fv[i];
    const Vec3 e1 = e.vertices[fv[1]] - e.vertices[fv[0]];
    const Vec3 e2 = e.vertices[fv.back()] - e.vertices[fv[0]];
    const Vec3 c = e1.cross(e2);
    f.param_scale = c.norm() / 4.0;
    f.normal = c.normalized();
    e.surface_area += (f.nv == 3 ? 2.0 : 4.0) * f.param_scale;
    e.faces.push_back(f);
  }
  return e;
}

std::vector<ReferenceElement> build_all() {
  std::vector<ReferenceElement> out;
  out.push_back(make_reference(
      ElemType::hex,
      {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1}, {-1, -1, 1}, {1, -1, 1}, {1, 1, 1}, {-1, 1, 1}},
      {{0, 3, 2, 1}, {0, 1, 5, 4}, {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}, {4, 5, 6, 7}}));
  out.push_back(make_reference(
      ElemType::wedge,
      {{-1, -1, -1}, {1, -1, -1}, {-1, -1, 1}, {-1, 1, -1}, {1, 1, -1}, {-1, 1, 1}},
      {{0, 1, 2}, {3, 5, 4}, {0, 3, 4, 1}, {0, 2, 5, 3}, {1, 4, 5, 2}}));
  out.push_back(make_reference(
      ElemType::pyramid, {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1}, {-1, -1, 1}},
      {{0, 3, 2, 1}, {0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}}));
  out.push_back(make_reference(ElemType::tet, {{-1, -1, -1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}},
                               {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2}}));
  return out;
}

constexpr double kSingular = 1e-14;

}  // namespace

const ReferenceElement& reference_element(ElemType type) {
  static const std::vector<ReferenceElement> all = build_all();
  return all[static_cast<int>(type)];
}

Vec3 duffy_map(ElemType type, const Vec3& abc) {
  const double a = abc(0), b = abc(1), c = abc(2);
  switch (type) {
    case ElemType::hex: return abc;
    case ElemType::wedge: return {0.5 * (1 + a) * (1 - c) - 1, b, c};
    case ElemType::pyramid: return {0.5 * (1 + a) * (1 - c) - 1, 0.5 * (1 + b) * (1 - c) - 1, c};
    case ElemType::tet:
      return {0.25 * (1 + a) * (1 - b) * (1 - c) - 1, 0.5 * (1 + b) * (1 - c) - 1, c};
  }
  return abc;
}

Vec3 collapse(ElemType type, const Vec3& rst) {
  const double r = rst(0), s = rst(1), t = rst(2);
  switch (type) {
    case ElemType::hex: return rst;
    case ElemType::wedge: {
      const double a = (1 - t) > kSingular ? 2 * (1 + r) / (1 - t) - 1 : -1.0;
      return {a, s, t};
    }
    case ElemType::pyramid: {
      if (1 - t <= kSingular) return {-1.0, -1.0, t};
      return {2 * (1 + r) / (1 - t) - 1, 2 * (1 + s) / (1 - t) - 1, t};
    }
    case ElemType::tet: {
      const double a = (-s - t) > kSingular ? 2 * (1 + r) / (-s - t) - 1 : -1.0;
      const double b = (1 - t) > kSingular ? 2 * (1 + s) / (1 - t) - 1 : -1.0;
      return {a, b, t};
    }
  }
  return rst;
}

std::array<double, 4> face_vertex_weights(FaceType ft, double xi, double eta) {
  if (ft == FaceType::tri) return {-0.5 * (xi + eta), 0.5 * (1 + xi), 0.5 * (1 + eta), 0.0};
  return {0.25 * (1 - xi) * (1 - eta), 0.25 * (1 + xi) * (1 - eta), 0.25 * (1 + xi) * (1 + eta),
          0.25 * (1 - xi) * (1 + eta)};
}

Eigen::Vector2d face_vertex_param(FaceType ft, int i) {
  static const double tri[3][2] = {{-1, -1}, {1, -1}, {-1, 1}};
  static const double quad[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  return ft == FaceType::tri ? Eigen::Vector2d(tri[i][0], tri[i][1])
                             : Eigen::Vector2d(quad[i][0], quad[i][1]);
}

Vec3 face_to_reference(ElemType type, int face, double xi, double eta) {
  const ReferenceElement& re = reference_element(type);
  const RefFace& f = re.faces.at(face);
  const auto w = face_vertex_weights(f.type, xi, eta);
  Vec3 x = Vec3::Zero();
  for (int i = 0; i < f.nv; ++i) x += w[i] * re.vertices[f.v[i]];
  return x;
}

int num_orientations(FaceType ft) { return ft == FaceType::tri ? 6 : 8; }

std::array<int, 4> orientation_permutation(FaceType ft, int code) {
  const int nv = ft == FaceType::tri ? 3 : 4;
  if (code < 0 || code >= 2 * nv) throw std::out_of_range("orientation code out of range");
  std::array<int, 4> s{0, 0, 0, 0};
  for (int i = 0; i < nv; ++i)
    s[i] = code < nv ? (i + code) % nv : ((code - nv) - i + nv) % nv;
  return s;
}

int orientation_code(FaceType ft, const std::array<int, 4>& sigma) {
  for (int o = 0; o < num_orientations(ft); ++o) {
    const auto p = orientation_permutation(ft, o);
    bool same = true;
    for (int i = 0; i < (ft == FaceType::tri ? 3 : 4); ++i) same = same && p[i] == sigma[i];
    if (same) return o;
  }
  return -1;
}

int inverse_orientation(FaceType ft, int code) {
  const auto p = orientation_permutation(ft, code);
  std::array<int, 4> inv{0, 0, 0, 0};
  for (int i = 0; i < (ft == FaceType::tri ? 3 : 4); ++i) inv[p[i]] = i;
  return orientation_code(ft, inv);
}

Eigen::Vector2d orient_face_point(FaceType ft, int code, double xi, double eta) {
  const auto w = face_vertex_weights(ft, xi, eta);
  const auto p = orientation_permutation(ft, code);
  Eigen::Vector2d out = Eigen::Vector2d::Zero();
  for (int i = 0; i < (ft == FaceType::tri ? 3 : 4); ++i) out += w[i] * face_vertex_param(ft, p[i]);
  return out;
}

// ---------------------------------------------------------------------------

ElementMap::ElementMap(ElemType type, Eigen::Matrix3Xd vertices) : type_(type), v_(std::move(vertices)) {
  if (v_.cols() != num_vertices(type))
    throw std::invalid_argument("ElementMap: wrong vertex count for " + to_string(type));
}

Vec3 ElementMap::centroid() const { return v_.rowwise().mean(); }

Eigen::VectorXd vertex_shape_functions(ElemType type, const Vec3& abc) {
  const ReferenceElement& re = reference_element(type);
  Eigen::VectorXd phi(re.vertices.size());
  switch (type) {
    case ElemType::hex:
      for (int i = 0; i < 8; ++i) {
        const Vec3& vi = re.vertices[i];
        phi(i) = (1 + abc(0) * vi(0)) * (1 + abc(1) * vi(1)) * (1 + abc(2) * vi(2)) / 8.0;
      }
      break;
    case ElemType::wedge: {
      const Vec3 rst = duffy_map(type, abc);
      const double r = rst(0), s = rst(1), t = rst(2);
      const double L[3] = {-0.5 * (r + t), 0.5 * (1 + r), 0.5 * (1 + t)};
      const double S[2] = {0.5 * (1 - s), 0.5 * (1 + s)};
      for (int i = 0; i < 6; ++i) phi(i) = L[i % 3] * S[i / 3];
      break;
    }
    case ElemType::pyramid: {
      // bilinear base functions in (a,b) scaled by (1-c)/2: rational in (r,s,t)
      const double a = abc(0), b = abc(1), c = abc(2);
      phi(0) = 0.125 * (1 - a) * (1 - b) * (1 - c);
      phi(1) = 0.125 * (1 + a) * (1 - b) * (1 - c);
      phi(2) = 0.125 * (1 + a) * (1 + b) * (1 - c);
      phi(3) = 0.125 * (1 - a) * (1 + b) * (1 - c);
      phi(4) = 0.5 * (1 + c);
      break;
    }
    case ElemType::tet: {
      const Vec3 rst = duffy_map(type, abc);
      phi(0) = -0.5 * (1 + rst(0) + rst(1) + rst(2));
      phi(1) = 0.5 * (1 + rst(0));
      phi(2) = 0.5 * (1 + rst(1));
      phi(3) = 0.5 * (1 + rst(2));
      break;
    }
  }
  return phi;
}

Vec3 ElementMap::point(const Vec3& abc) const { return v_ * vertex_shape_functions(type_, abc); }

Mat3 ElementMap::jacobian(const Vec3& abc) const {
  Mat3 Jm = Mat3::Zero();
  switch (type_) {
    case ElemType::hex: {
      const ReferenceElement& re = reference_element(type_);
      const double r = abc(0), s = abc(1), t = abc(2);
      for (int i = 0; i < 8; ++i) {
        const Vec3& vi = re.vertices[i];
        const double fr = 1 + r * vi(0), fs = 1 + s * vi(1), ft = 1 + t * vi(2);
        Jm.col(0) += vi(0) * fs * ft / 8.0 * v_.col(i);
        Jm.col(1) += fr * vi(1) * ft / 8.0 * v_.col(i);
        Jm.col(2) += fr * fs * vi(2) / 8.0 * v_.col(i);
      }
      break;
    }
    case ElemType::wedge: {
      const Vec3 rst = duffy_map(type_, abc);
      const double r = rst(0), s = rst(1), t = rst(2);
      const double L[3] = {-0.5 * (r + t), 0.5 * (1 + r), 0.5 * (1 + t)};
      const double Lr[3] = {-0.5, 0.5, 0.0}, Lt[3] = {-0.5, 0.0, 0.5};
      const double S[2] = {0.5 * (1 - s), 0.5 * (1 + s)}, Ss[2] = {-0.5, 0.5};
      for (int i = 0; i < 6; ++i) {
        const int l = i % 3, k = i / 3;
        Jm.col(0) += Lr[l] * S[k] * v_.col(i);
        Jm.col(1) += L[l] * Ss[k] * v_.col(i);
        Jm.col(2) += Lt[l] * S[k] * v_.col(i);
      }
      break;
    }
    case ElemType::pyramid: {
      const double a = abc(0), b = abc(1);
      const double B[4] = {0.25 * (1 - a) * (1 - b), 0.25 * (1 + a) * (1 - b), 0.25 * (1 + a) * (1 + b),
                           0.25 * (1 - a) * (1 + b)};
      const double Ba[4] = {-0.25 * (1 - b), 0.25 * (1 - b), 0.25 * (1 + b), -0.25 * (1 + b)};
      const double Bb[4] = {-0.25 * (1 - a), -0.25 * (1 + a), 0.25 * (1 + a), 0.25 * (1 - a)};
      Vec3 X = Vec3::Zero(), Xa = Vec3::Zero(), Xb = Vec3::Zero();
      for (int i = 0; i < 4; ++i) {
        X += B[i] * v_.col(i);
        Xa += Ba[i] * v_.col(i);
        Xb += Bb[i] * v_.col(i);
      }
      Jm.col(0) = Xa;
      Jm.col(1) = Xb;
      Jm.col(2) = 0.5 * (1 + a) * Xa + 0.5 * (1 + b) * Xb + 0.5 * (v_.col(4) - X);
      break;
    }
    case ElemType::tet:
      Jm.col(0) = 0.5 * (v_.col(1) - v_.col(0));
      Jm.col(1) = 0.5 * (v_.col(2) - v_.col(0));
      Jm.col(2) = 0.5 * (v_.col(3) - v_.col(0));
      break;
  }
  return Jm;
}

Vec3 ElementMap::det_gradient_rst(const Vec3& abc) const {
  if (type_ == ElemType::tet) return Vec3::Zero();
  if (type_ == ElemType::pyramid)
    throw std::logic_error("det_gradient_rst: pyramid map is not polynomial in (r,s,t)");
  // H[k].col(j) = d^2 x / d xi_k d xi_j
  std::array<Mat3, 3> H;
  for (auto& h : H) h.setZero();
  if (type_ == ElemType::hex) {
    const ReferenceElement& re = reference_element(type_);
    const double r = abc(0), s = abc(1), t = abc(2);
    for (int i = 0; i < 8; ++i) {
      const Vec3& vi = re.vertices[i];
      const Vec3 x = v_.col(i);
      const double rs = vi(0) * vi(1) * (1 + t * vi(2)) / 8.0;
      const double rt = vi(0) * vi(2) * (1 + s * vi(1)) / 8.0;
      const double st = vi(1) * vi(2) * (1 + r * vi(0)) / 8.0;
      H[0].col(1) += rs * x;
      H[1].col(0) += rs * x;
      H[0].col(2) += rt * x;
      H[2].col(0) += rt * x;
      H[1].col(2) += st * x;
      H[2].col(1) += st * x;
    }
  } else {
    const double Lr[3] = {-0.5, 0.5, 0.0}, Lt[3] = {-0.5, 0.0, 0.5}, Ss[2] = {-0.5, 0.5};
    for (int i = 0; i < 6; ++i) {
      const int l = i % 3, k = i / 3;
      const Vec3 x = v_.col(i);
      H[0].col(1) += Lr[l] * Ss[k] * x;
      H[1].col(0) += Lr[l] * Ss[k] * x;
      H[2].col(1) += Lt[l] * Ss[k] * x;
      H[1].col(2) += Lt[l] * Ss[k] * x;
    }
  }
  const Mat3 Jm = jacobian(abc);
  Vec3 g;
  for (int k = 0; k < 3; ++k) {
    double sum = 0.0;
    for (int j = 0; j < 3; ++j) {
      Mat3 M = Jm;
      M.col(j) = H[k].col(j);
      sum += M.determinant();
    }
    g(k) = sum;
  }
  return g;
}

FaceGeometry face_geometry(const ElementMap& map, int face, const Eigen::MatrixX2d& params) {
  const ReferenceElement& re = reference_element(map.type());
  const RefFace& f = re.faces.at(face);
  const Vec3 e1 = 0.5 * (re.vertices[f.v[1]] - re.vertices[f.v[0]]);
  const Vec3 e2 = 0.5 * (re.vertices[f.v[f.nv - 1]] - re.vertices[f.v[0]]);
  const Eigen::Index n = params.rows();
  FaceGeometry g;
  g.x.resize(3, n);
  g.normal.resize(3, n);
  g.Js.resize(n);
  g.dA.resize(n);
  for (Eigen::Index q = 0; q < n; ++q) {
    const Vec3 rst = face_to_reference(map.type(), face, params(q, 0), params(q, 1));
    const Vec3 abc = collapse(map.type(), rst);
    const Mat3 Jm = map.jacobian(abc);
    const Vec3 c = (Jm * e1).cross(Jm * e2);
    const double nrm = c.norm();
    g.x.col(q) = map.point(abc);
    g.normal.col(q) = c / nrm;
    g.dA(q) = nrm;
    g.Js(q) = nrm / f.param_scale;
  }
  return g;
}

GeometricFactors build_geometric_factors(const ElementMap& map, const QuadratureRule& vol,
                                         const std::vector<Eigen::MatrixX2d>& face_params) {
  if (vol.collapsed.rows() != vol.size())
    throw std::invalid_argument("build_geometric_factors: rule lacks collapsed coordinates");
  GeometricFactors gf;
  const Eigen::Index n = vol.size();
  gf.J.resize(n);
  gf.G.resize(9, n);
  gf.x.resize(3, n);
  for (Eigen::Index q = 0; q < n; ++q) {
    const Vec3 abc = vol.collapsed.row(q).transpose();
    const Mat3 Jm = map.jacobian(abc);
    gf.J(q) = Jm.determinant();
    if (!(gf.J(q) > 0)) {
      const Vec3 c = map.centroid();
      throw std::domain_error("invalid " + to_string(map.type()) + " element centred at (" + std::to_string(c(0)) +
                              ", " + std::to_string(c(1)) + ", " + std::to_string(c(2)) +
                              "): nonpositive Jacobian at a cubature point");
    }
    const Mat3 Gi = Jm.inverse();
    for (int d = 0; d < 3; ++d)
      for (int c = 0; c < 3; ++c) gf.G(3 * d + c, q) = Gi(d, c);
    gf.x.col(q) = map.point(abc);
  }
  for (std::size_t f = 0; f < face_params.size(); ++f)
    gf.faces.push_back(face_geometry(map, static_cast<int>(f), face_params[f]));
  return gf;
}

}  // namespace hdg
