#include <fstream>
#include <sstream>
#include <unordered_map>

#include "hybriddg/mesh.hpp"

namespace hdg {

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++lineno_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  }
  std::string expect_line(const char* what) {
    std::string line;
    if (!next(line)) fail(std::string("unexpected end of file, expected ") + what);
    return line;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw MeshError("gmsh line " + std::to_string(lineno_) + ": " + msg);
  }
  int lineno() const { return lineno_; }

 private:
  std::istream& in_;
  int lineno_ = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

long parse_count(LineReader& r, const std::string& line) {
  std::istringstream ss(line);
  long n = -1;
  if (!(ss >> n) || n < 0) r.fail("expected a non-negative count, got '" + trim(line) + "'");
  return n;
}

int vertices_for(int code) {
  switch (code) {
    case 4: return 4;
    case 5: return 8;
    case 6: return 6;
    case 7: return 5;
    default: return -1;
  }
}

ElemType type_for(int code) {
  switch (code) {
    case 4: return ElemType::tet;
    case 5: return ElemType::hex;
    case 6: return ElemType::wedge;
    default: return ElemType::pyramid;
  }
}

}  // namespace

HybridMesh read_gmsh(std::istream& in) {
  LineReader r(in);
  HybridMesh m;
  std::unordered_map<long, int> node_index;
  bool have_format = false, have_nodes = false, have_elements = false;
  std::string line;
  while (r.next(line)) {
    const std::string tag = trim(line);
    if (tag == "$MeshFormat") {
      std::istringstream ss(r.expect_line("format line"));
      std::string version;
      int file_type = -1, dsize = 0;
      if (!(ss >> version >> file_type >> dsize)) r.fail("malformed $MeshFormat line");
      if (version.rfind("2.", 0) != 0) r.fail("unsupported format version " + version + " (need 2.2)");
      if (file_type != 0) r.fail("binary files are not supported");
      if (trim(r.expect_line("$EndMeshFormat")) != "$EndMeshFormat") r.fail("expected $EndMeshFormat");
      have_format = true;
    } else if (tag == "$Nodes") {
      const long n = parse_count(r, r.expect_line("node count"));
      m.vertices.reserve(n);
      for (long i = 0; i < n; ++i) {
        std::istringstream ss(r.expect_line("node"));
        long id;
        double x, y, z;
        if (!(ss >> id >> x >> y >> z)) r.fail("malformed node line");
        if (!node_index.emplace(id, static_cast<int>(m.vertices.size())).second)
          r.fail("duplicate node id " + std::to_string(id));
        m.vertices.emplace_back(x, y, z);
      }
      if (trim(r.expect_line("$EndNodes")) != "$EndNodes") r.fail("expected $EndNodes");
      have_nodes = true;
    } else if (tag == "$Elements") {
      if (!have_nodes) r.fail("$Elements before $Nodes");
      const long n = parse_count(r, r.expect_line("element count"));
      for (long i = 0; i < n; ++i) {
        std::istringstream ss(r.expect_line("element"));
        long id;
        int code, ntags;
        if (!(ss >> id >> code >> ntags) || ntags < 0) r.fail("malformed element line");
        std::vector<int> tags(ntags);
        for (int& t : tags)
          if (!(ss >> t)) r.fail("missing element tag");
        if (code == 1 || code == 2 || code == 3 || code == 15) continue;
        const int nv = vertices_for(code);
        if (nv < 0) r.fail("unsupported element type " + std::to_string(code));
        MeshElement el;
        el.type = type_for(code);
        el.tag = ntags > 0 ? tags[0] : 0;
        for (int k = 0; k < nv; ++k) {
          long nid;
          if (!(ss >> nid)) r.fail("element has too few nodes");
          const auto it = node_index.find(nid);
          if (it == node_index.end()) r.fail("unknown node id " + std::to_string(nid));
          el.v.push_back(it->second);
        }
        m.elements.push_back(std::move(el));
      }
      if (trim(r.expect_line("$EndElements")) != "$EndElements") r.fail("expected $EndElements");
      have_elements = true;
    } else if (!tag.empty() && tag[0] == '$') {
      // skip unknown sections such as $PhysicalNames
      const std::string end = "$End" + tag.substr(1);
      while (true)
        if (trim(r.expect_line(end.c_str())) == end) break;
    } else {
      r.fail("unexpected content '" + tag + "'");
    }
  }
  if (!have_format) throw MeshError("gmsh: missing $MeshFormat section");
  if (!have_elements) throw MeshError("gmsh: missing $Elements section");
  if (m.elements.empty()) throw MeshError("gmsh: no volume elements");
  m.finalize();
  return m;
}

HybridMesh read_gmsh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file '" + path + "'");
  return read_gmsh(in);
}

}  // namespace hdg
