#include "vplate/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "vplate/errors.hpp"

namespace vplate {

namespace {

[[noreturn]] void parse_fail(const std::string& path, size_t line, const std::string& what) {
  throw AnalysisError("parse-error", path + ":" + std::to_string(line) + ": " + what);
}

std::string lower_ext(const std::string& path) {
  auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return {};
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

struct PlyProperty {
  std::string name;
  int byte_size = 0;       // scalar size
  bool is_list = false;
  int count_size = 0;      // list count scalar size
  int elem_size = 0;       // list element scalar size
  bool is_float = false;   // float/double scalar
};

int ply_type_size(const std::string& t) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" || t == "float32") return 4;
  if (t == "double" || t == "float64") return 8;
  return 0;
}

bool ply_type_float(const std::string& t) {
  return t == "float" || t == "float32" || t == "double" || t == "float64";
}

double read_scalar_le(std::istream& in, int size, bool is_float) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), size);
  if (is_float) {
    if (size == 4) { float f; std::memcpy(&f, buf, 4); return f; }
    double d; std::memcpy(&d, buf, 8); return d;
  }
  // integers stored little-endian; sign handling only matters for counts/indices
  int64_t v = 0;
  for (int i = size - 1; i >= 0; --i) v = (v << 8) | buf[i];
  // sign-extend signed types is unnecessary here: vertex indices are non-negative
  return static_cast<double>(v);
}

struct PlyElement {
  std::string name;
  size_t count = 0;
  std::vector<PlyProperty> properties;
};

TriangleMesh parse_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AnalysisError("parse-error", "cannot open " + path);

  std::string line;
  size_t lineno = 0;
  auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line)) parse_fail(path, lineno, "unexpected end of header");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };

  next_line();
  if (line != "ply") parse_fail(path, lineno, "missing 'ply' magic");
  bool binary = false;
  bool have_format = false;
  std::vector<PlyElement> elements;
  while (true) {
    next_line();
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    if (tok == "comment" || tok == "obj_info" || tok.empty()) continue;
    if (tok == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt == "ascii") binary = false;
      else if (fmt == "binary_little_endian") binary = true;
      else if (fmt == "binary_big_endian")
        throw AnalysisError("unsupported-format", "big-endian PLY is not supported: " + path);
      else parse_fail(path, lineno, "unknown PLY format '" + fmt + "'");
      have_format = true;
    } else if (tok == "element") {
      PlyElement el;
      ss >> el.name >> el.count;
      elements.push_back(el);
    } else if (tok == "property") {
      if (elements.empty()) parse_fail(path, lineno, "property before element");
      PlyProperty p;
      std::string type;
      ss >> type;
      if (type == "list") {
        std::string ct, et;
        ss >> ct >> et >> p.name;
        p.is_list = true;
        p.count_size = ply_type_size(ct);
        p.elem_size = ply_type_size(et);
        if (!p.count_size || !p.elem_size) parse_fail(path, lineno, "bad list types");
      } else {
        ss >> p.name;
        p.byte_size = ply_type_size(type);
        p.is_float = ply_type_float(type);
        if (!p.byte_size) parse_fail(path, lineno, "unknown property type '" + type + "'");
      }
      elements.back().properties.push_back(p);
    } else if (tok == "end_header") {
      break;
    } else {
      parse_fail(path, lineno, "unexpected header token '" + tok + "'");
    }
  }
  if (!have_format) parse_fail(path, lineno, "missing format line");

  TriangleMesh mesh;
  for (const PlyElement& el : elements) {
    const bool is_vertex = el.name == "vertex";
    const bool is_face = el.name == "face";
    int ix = -1, iy = -1, iz = -1, ilist = -1;
    if (is_vertex) {
      for (size_t i = 0; i < el.properties.size(); ++i) {
        if (el.properties[i].name == "x") ix = static_cast<int>(i);
        if (el.properties[i].name == "y") iy = static_cast<int>(i);
        if (el.properties[i].name == "z") iz = static_cast<int>(i);
      }
      if (ix < 0 || iy < 0 || iz < 0) parse_fail(path, lineno, "vertex element lacks x/y/z");
      mesh.vertices.reserve(el.count);
    }
    if (is_face) {
      for (size_t i = 0; i < el.properties.size(); ++i) {
        const auto& p = el.properties[i];
        if (p.is_list && (p.name == "vertex_indices" || p.name == "vertex_index"))
          ilist = static_cast<int>(i);
      }
      if (ilist < 0) parse_fail(path, lineno, "face element lacks vertex_indices");
      mesh.faces.reserve(el.count);
    }

    for (size_t r = 0; r < el.count; ++r) {
      std::vector<double> scalars(el.properties.size(), 0.0);
      std::vector<int> indices;
      if (binary) {
        for (size_t i = 0; i < el.properties.size(); ++i) {
          const auto& p = el.properties[i];
          if (p.is_list) {
            int n = static_cast<int>(read_scalar_le(in, p.count_size, false));
            for (int k = 0; k < n; ++k) {
              double v = read_scalar_le(in, p.elem_size, false);
              if (static_cast<int>(i) == ilist) indices.push_back(static_cast<int>(v));
            }
          } else {
            scalars[i] = read_scalar_le(in, p.byte_size, p.is_float);
          }
        }
        if (!in) parse_fail(path, lineno, "truncated binary payload");
      } else {
        next_line();
        std::istringstream ss(line);
        for (size_t i = 0; i < el.properties.size(); ++i) {
          const auto& p = el.properties[i];
          if (p.is_list) {
            int n = 0;
            if (!(ss >> n)) parse_fail(path, lineno, "bad list count");
            for (int k = 0; k < n; ++k) {
              double v;
              if (!(ss >> v)) parse_fail(path, lineno, "truncated list");
              if (static_cast<int>(i) == ilist) indices.push_back(static_cast<int>(v));
            }
          } else {
            if (!(ss >> scalars[i])) parse_fail(path, lineno, "truncated record");
          }
        }
      }
      if (is_vertex) {
        mesh.vertices.emplace_back(scalars[ix], scalars[iy], scalars[iz]);
      } else if (is_face) {
        if (indices.size() < 3) parse_fail(path, lineno, "face with fewer than 3 vertices");
        for (size_t k = 2; k < indices.size(); ++k)  // fan-triangulate
          mesh.faces.push_back({indices[0], indices[k - 1], indices[k]});
      }
    }
  }
  return mesh;
}

TriangleMesh parse_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw AnalysisError("parse-error", "cannot open " + path);
  TriangleMesh mesh;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) continue;
    if (tok == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z)) parse_fail(path, lineno, "bad vertex record");
      mesh.vertices.emplace_back(x, y, z);
    } else if (tok == "f") {
      std::vector<int> idx;
      std::string ref;
      while (ss >> ref) {
        // take the position index, ignore /vt and /vn
        auto slash = ref.find('/');
        int v = 0;
        auto end = (slash == std::string::npos) ? ref.size() : slash;
        auto res = std::from_chars(ref.data(), ref.data() + end, v);
        if (res.ec != std::errc()) parse_fail(path, lineno, "bad face index '" + ref + "'");
        if (v < 0) v = static_cast<int>(mesh.vertices.size()) + v + 1;  // relative index
        idx.push_back(v - 1);  // OBJ is 1-based
      }
      if (idx.size() < 3) parse_fail(path, lineno, "face with fewer than 3 vertices");
      for (size_t k = 2; k < idx.size(); ++k)
        mesh.faces.push_back({idx[0], idx[k - 1], idx[k]});
    }
    // vt/vn/vp/usemtl/mtllib/o/g/s and comments are ignored
  }
  return mesh;
}

}  // namespace

LoadedMesh load_mesh(const std::string& path, MeshFormat format, double unit_scale) {
  if (!(unit_scale > 0.0))
    throw AnalysisError("invalid-argument", "unit_scale must be positive");

  if (format == MeshFormat::Auto) {
    std::string ext = lower_ext(path);
    if (ext == "obj") format = MeshFormat::Obj;
    else if (ext == "ply") format = MeshFormat::PlyAscii;  // parser detects binary itself
    else throw AnalysisError("unsupported-format", "cannot infer format of " + path);
  }

  TriangleMesh mesh = (format == MeshFormat::Obj) ? parse_obj(path) : parse_ply(path);
  mesh.name = path;

  if (mesh.vertices.empty() || mesh.faces.empty())
    throw AnalysisError("empty-mesh", path + " contains no usable geometry");
  const int n = static_cast<int>(mesh.vertices.size());
  for (const Vec3& v : mesh.vertices) {
    if (!v.allFinite())
      throw AnalysisError("invalid-vertex", "non-finite coordinate in " + path);
  }
  for (const auto& face : mesh.faces) {
    for (int idx : face) {
      if (idx < 0 || idx >= n)
        throw AnalysisError("invalid-vertex", path + ": face references vertex " +
                                                  std::to_string(idx) + " of " +
                                                  std::to_string(n));
    }
  }

  if (unit_scale != 1.0)
    for (Vec3& v : mesh.vertices) v *= unit_scale;

  // Photogrammetric meshes routinely contain sliver faces; drop them.
  LoadedMesh out;
  out.mesh.name = mesh.name;
  out.mesh.vertices = std::move(mesh.vertices);
  for (const auto& face : mesh.faces) {
    bool distinct = face[0] != face[1] && face[1] != face[2] && face[0] != face[2];
    if (distinct) {
      const Vec3 e1 = out.mesh.vertices[face[1]] - out.mesh.vertices[face[0]];
      const Vec3 e2 = out.mesh.vertices[face[2]] - out.mesh.vertices[face[0]];
      if (0.5 * e1.cross(e2).norm() > 1e-12) {
        out.mesh.faces.push_back(face);
        continue;
      }
    }
    ++out.degenerate_faces_dropped;
  }
  if (out.mesh.faces.empty())
    throw AnalysisError("empty-mesh", path + ": all faces degenerate");
  return out;
}

}  // namespace vplate
