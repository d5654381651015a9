#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hybriddg/refelem.hpp"
#include "hybriddg/types.hpp"

namespace hdg {

struct Material {
  double rho = 1.0;
  double kappa = 1.0;
  double wave_speed() const;
  double impedance() const;  // rho * c
};

struct MeshElement {
  ElemType type = ElemType::hex;
  std::vector<int> v;
  int tag = 0;
};

// Neighbour across one local face. `code` is the orientation of the shared face:
// the neighbour's local face vertex sigma(i) equals this element's local face vertex i.
struct FaceLink {
  int nbr = -1;
  int nbr_face = -1;
  int code = 0;
  bool boundary() const { return nbr < 0; }
};

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class HybridMesh {
 public:
  std::vector<Vec3> vertices;
  std::vector<MeshElement> elements;
  std::map<int, Material> materials;  // by physical tag; missing tags use the default
  std::vector<std::vector<FaceLink>> links;

  int size() const { return static_cast<int>(elements.size()); }
  std::array<int, 4> counts() const;  // indexed by ElemType
  ElementMap element_map(int e) const;
  const Material& material(int e) const;
  std::vector<int> face_vertices(int e, int f) const;

  // Reorders vertices of inverted elements; throws on degenerate ones.
  void fix_orientation();
  // Matches faces by vertex set; throws MeshError on non-conforming faces.
  void build_connectivity();
  void finalize() {
    fix_orientation();
    build_connectivity();
  }

  // Whether element e's face f owns the shared face data (boundary faces are owned).
  bool owns_face(int e, int f) const;
  double min_edge_length(int e) const;

 private:
  Material default_material_;
};

// Unit cube [0,1]^3 split into n^3 cells: hex 1 per cell, wedge 2, pyramid 6
// (apex at cell centre), tet 6 (Kuhn).
HybridMesh uniform_mesh(ElemType type, int n);

// Layered hybrid mesh of the unit cube, n even: z < 1/2 holds hexahedra (x >= 1/2)
// and wedge pairs (x < 1/2); the cell layer above holds one pyramid and ten
// tetrahedra per cell; the rest is Kuhn tetrahedra.
HybridMesh hybrid_mesh(int n);

// "hex:4", "wedge:2", "pyramid:3", "tet:8", "hybrid:2", or a .msh path.
HybridMesh make_mesh(const std::string& spec);

// GMSH 2.2 ASCII. Volume elements 4=tet, 5=hex, 6=prism, 7=pyramid are kept,
// points/lines/surfaces (15, 1, 2, 3) are skipped. The first tag is the physical group.
HybridMesh read_gmsh(std::istream& in);
HybridMesh read_gmsh_file(const std::string& path);

}  // namespace hdg
