#pragma once

#include <string>

#include "vplate/mesh.hpp"

namespace vplate {

enum class MeshFormat { Auto, PlyAscii, PlyBinaryLE, Obj };

struct LoadedMesh {
  TriangleMesh mesh;
  int degenerate_faces_dropped = 0;
};

/// Reads a PLY (ascii or binary little-endian) or OBJ mesh and scales every
/// vertex by `unit_scale`. Degenerate faces (repeated indices or area below
/// 1e-12 mm^2) are dropped and counted. Big-endian PLY is rejected.
///
/// Errors: "parse-error", "empty-mesh", "invalid-vertex", "unsupported-format".
LoadedMesh load_mesh(const std::string& path,
                     MeshFormat format = MeshFormat::Auto,
                     double unit_scale = 1.0);

}  // namespace vplate
