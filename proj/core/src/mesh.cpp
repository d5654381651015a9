#include "hybriddg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hdg {

double Material::wave_speed() const { return std::sqrt(kappa / rho); }
double Material::impedance() const { return std::sqrt(rho * kappa); }

std::array<int, 4> HybridMesh::counts() const {
  std::array<int, 4> c{0, 0, 0, 0};
  for (const auto& e : elements) ++c[static_cast<int>(e.type)];
  return c;
}

ElementMap HybridMesh::element_map(int e) const {
  const MeshElement& el = elements.at(e);
  Eigen::Matrix3Xd X(3, el.v.size());
  for (std::size_t i = 0; i < el.v.size(); ++i) X.col(i) = vertices.at(el.v[i]);
  return ElementMap(el.type, X);
}

const Material& HybridMesh::material(int e) const {
  const auto it = materials.find(elements.at(e).tag);
  return it == materials.end() ? default_material_ : it->second;
}

std::vector<int> HybridMesh::face_vertices(int e, int f) const {
  const MeshElement& el = elements.at(e);
  const RefFace& rf = reference_element(el.type).faces.at(f);
  std::vector<int> out(rf.nv);
  for (int i = 0; i < rf.nv; ++i) out[i] = el.v[rf.v[i]];
  return out;
}

namespace {

std::vector<int> reflection(ElemType t) {
  switch (t) {
    case ElemType::hex: return {0, 3, 2, 1, 4, 7, 6, 5};
    case ElemType::wedge: return {3, 4, 5, 0, 1, 2};
    case ElemType::pyramid: return {0, 3, 2, 1, 4};
    case ElemType::tet: return {0, 2, 1, 3};
  }
  return {};
}

// Interior sample points (collapsed coordinates) for the orientation check.
std::vector<Vec3> probe_points() {
  std::vector<Vec3> p;
  for (double a : {-0.9, 0.0, 0.9})
    for (double b : {-0.9, 0.0, 0.9})
      for (double c : {-0.9, 0.0, 0.9}) p.emplace_back(a, b, c);
  return p;
}

}  // namespace

void HybridMesh::fix_orientation() {
  static const std::vector<Vec3> probes = probe_points();
  for (int e = 0; e < size(); ++e) {
    MeshElement& el = elements[e];
    if (static_cast<int>(el.v.size()) != num_vertices(el.type))
      throw MeshError("element " + std::to_string(e) + ": wrong vertex count");
    if (element_map(e).det(Vec3::Zero()) < 0) {
      const auto perm = reflection(el.type);
      std::vector<int> v(el.v.size());
      for (std::size_t i = 0; i < perm.size(); ++i) v[i] = el.v[perm[i]];
      el.v = v;
    }
    const ElementMap map = element_map(e);
    for (const Vec3& p : probes)
      if (!(map.det(p) > 0))
        throw MeshError("element " + std::to_string(e) + " (" + to_string(el.type) +
                        ") is degenerate or not convex");
  }
}

void HybridMesh::build_connectivity() {
  using Key = std::array<int, 4>;
  std::map<Key, std::vector<std::pair<int, int>>> faces;
  links.assign(elements.size(), {});
  for (int e = 0; e < size(); ++e) {
    const int nf = num_faces(elements[e].type);
    links[e].assign(nf, FaceLink{});
    for (int f = 0; f < nf; ++f) {
      auto fv = face_vertices(e, f);
      std::sort(fv.begin(), fv.end());
      Key k{-1, -1, -1, -1};
      std::copy(fv.begin(), fv.end(), k.begin());
      faces[k].emplace_back(e, f);
    }
  }
  for (const auto& [key, list] : faces) {
    if (list.size() == 1) continue;
    if (list.size() > 2) throw MeshError("face shared by more than two elements");
    const auto [e0, f0] = list[0];
    const auto [e1, f1] = list[1];
    const auto g = face_vertices(e0, f0);
    const auto h = face_vertices(e1, f1);
    if (g.size() != h.size()) throw MeshError("triangle matched against quadrilateral");
    const FaceType ft = g.size() == 3 ? FaceType::tri : FaceType::quad;
    std::array<int, 4> s01{0, 0, 0, 0}, s10{0, 0, 0, 0};
    for (std::size_t i = 0; i < g.size(); ++i) {
      s01[i] = static_cast<int>(std::find(h.begin(), h.end(), g[i]) - h.begin());
      s10[i] = static_cast<int>(std::find(g.begin(), g.end(), h[i]) - g.begin());
    }
    const int c01 = orientation_code(ft, s01), c10 = orientation_code(ft, s10);
    if (c01 < 0 || c10 < 0) throw MeshError("shared face vertices are not a rotation or reflection");
    links[e0][f0] = FaceLink{e1, f1, c01};
    links[e1][f1] = FaceLink{e0, f0, c10};
  }
}

bool HybridMesh::owns_face(int e, int f) const {
  const FaceLink& l = links.at(e).at(f);
  if (l.boundary()) return true;
  return e < l.nbr || (e == l.nbr && f < l.nbr_face);
}

double HybridMesh::min_edge_length(int e) const {
  const MeshElement& el = elements.at(e);
  double h = 1e300;
  for (std::size_t i = 0; i < el.v.size(); ++i)
    for (std::size_t j = i + 1; j < el.v.size(); ++j)
      h = std::min(h, (vertices[el.v[i]] - vertices[el.v[j]]).norm());
  return h;
}

// --------------------------------------------------------------- generators

namespace {

struct Grid {
  int n;
  int id(int i, int j, int k) const { return i + (n + 1) * (j + (n + 1) * k); }
};

void add_grid_vertices(HybridMesh& m, int n) {
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i)
        m.vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n,
                                static_cast<double>(k) / n);
}

// corner (bx,by,bz) of cell (i,j,k)
struct Cell {
  const Grid& g;
  int i, j, k;
  int c(int bx, int by, int bz) const { return g.id(i + bx, j + by, k + bz); }
};

void add_hex(HybridMesh& m, const Cell& c) {
  m.elements.push_back({ElemType::hex,
                        {c.c(0, 0, 0), c.c(1, 0, 0), c.c(1, 1, 0), c.c(0, 1, 0), c.c(0, 0, 1), c.c(1, 0, 1),
                         c.c(1, 1, 1), c.c(0, 1, 1)},
                        0});
}

// Two wedges: triangles in (x,z) split along the x-z anti-diagonal, extruded in y.
void add_wedge_pair(HybridMesh& m, const Cell& c) {
  m.elements.push_back(
      {ElemType::wedge, {c.c(0, 0, 0), c.c(1, 0, 0), c.c(0, 0, 1), c.c(0, 1, 0), c.c(1, 1, 0), c.c(0, 1, 1)}, 0});
  m.elements.push_back(
      {ElemType::wedge, {c.c(1, 0, 1), c.c(0, 0, 1), c.c(1, 0, 0), c.c(1, 1, 1), c.c(0, 1, 1), c.c(1, 1, 0)}, 0});
}

void add_kuhn(HybridMesh& m, const Cell& c) {
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (const auto& p : perms) {
    int b[3] = {0, 0, 0};
    std::vector<int> v{c.c(0, 0, 0)};
    for (int s = 0; s < 2; ++s) {
      b[p[s]] = 1;
      v.push_back(c.c(b[0], b[1], b[2]));
    }
    v.push_back(c.c(1, 1, 1));
    m.elements.push_back({ElemType::tet, v, 0});
  }
}

int add_center(HybridMesh& m, const Cell& c) {
  const int n = c.g.n;
  m.vertices.emplace_back((c.i + 0.5) / n, (c.j + 0.5) / n, (c.k + 0.5) / n);
  return static_cast<int>(m.vertices.size()) - 1;
}

// corners of the cell face normal to axis d at side b, cyclic order
std::array<int, 4> cell_face(const Cell& c, int d, int b) {
  const int e = (d + 1) % 3, f = (d + 2) % 3;
  std::array<int, 4> out{};
  const int uv[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (int q = 0; q < 4; ++q) {
    int bb[3];
    bb[d] = b;
    bb[e] = uv[q][0];
    bb[f] = uv[q][1];
    out[q] = c.c(bb[0], bb[1], bb[2]);
  }
  return out;
}

void add_pyramid6(HybridMesh& m, const Cell& c) {
  const int ctr = add_center(m, c);
  for (int d = 0; d < 3; ++d)
    for (int b = 0; b < 2; ++b) {
      const auto f = cell_face(c, d, b);
      m.elements.push_back({ElemType::pyramid, {f[0], f[1], f[2], f[3], ctr}, 0});
    }
}

// Pyramid on the bottom face, two tetrahedra on each remaining face, split along
// the face diagonal through its lowest corner (the Kuhn convention).
void add_transition(HybridMesh& m, const Cell& c) {
  const int ctr = add_center(m, c);
  const auto bottom = cell_face(c, 2, 0);
  m.elements.push_back({ElemType::pyramid, {bottom[0], bottom[1], bottom[2], bottom[3], ctr}, 0});
  for (int d = 0; d < 3; ++d)
    for (int b = 0; b < 2; ++b) {
      if (d == 2 && b == 0) continue;
      const auto f = cell_face(c, d, b);
      m.elements.push_back({ElemType::tet, {f[0], f[1], f[2], ctr}, 0});
      m.elements.push_back({ElemType::tet, {f[0], f[2], f[3], ctr}, 0});
    }
}

}  // namespace

HybridMesh uniform_mesh(ElemType type, int n) {
  if (n < 1) throw std::invalid_argument("uniform_mesh: n must be >= 1");
  HybridMesh m;
  add_grid_vertices(m, n);
  const Grid g{n};
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Cell c{g, i, j, k};
        switch (type) {
          case ElemType::hex: add_hex(m, c); break;
          case ElemType::wedge: add_wedge_pair(m, c); break;
          case ElemType::pyramid: add_pyramid6(m, c); break;
          case ElemType::tet: add_kuhn(m, c); break;
        }
      }
  m.finalize();
  return m;
}

HybridMesh hybrid_mesh(int n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("hybrid_mesh: n must be even and >= 2");
  HybridMesh m;
  add_grid_vertices(m, n);
  const Grid g{n};
  const int half = n / 2;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Cell c{g, i, j, k};
        if (k < half) {
          if (i < half)
            add_wedge_pair(m, c);
          else
            add_hex(m, c);
        } else if (k == half) {
          add_transition(m, c);
        } else {
          add_kuhn(m, c);
        }
      }
  m.finalize();
  return m;
}

HybridMesh make_mesh(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon != std::string::npos && spec.find('/') == std::string::npos &&
      spec.find(".msh") == std::string::npos) {
    const std::string kind = spec.substr(0, colon);
    const int n = std::stoi(spec.substr(colon + 1));
    if (kind == "hybrid") return hybrid_mesh(n);
    return uniform_mesh(elem_type_from_string(kind), n);
  }
  return read_gmsh_file(spec);
}

}  // namespace hdg
