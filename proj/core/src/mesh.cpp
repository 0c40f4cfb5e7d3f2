#include "vplate/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "vplate/errors.hpp"

namespace vplate {

namespace {

constexpr double kMinFaceArea = 1e-12;  // mm^2
constexpr size_t kMinLoopPoints = 10;   // below this, a loop is scan noise

uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
}

}  // namespace

void TriangleMesh::validate() const {
  if (vertices.empty() || faces.empty())
    throw AnalysisError("empty-mesh", "mesh '" + name + "' has no geometry");
  for (const Vec3& v : vertices) {
    if (!v.allFinite())
      throw AnalysisError("invalid-vertex", "non-finite coordinate in '" + name + "'");
  }
  const int n = static_cast<int>(vertices.size());
  for (size_t f = 0; f < faces.size(); ++f) {
    const auto& face = faces[f];
    for (int idx : face) {
      if (idx < 0 || idx >= n)
        throw AnalysisError("invalid-vertex",
                            "face " + std::to_string(f) + " references vertex " +
                                std::to_string(idx) + " of " + std::to_string(n));
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2] ||
        face_area(static_cast<int>(f)) <= kMinFaceArea)
      throw AnalysisError("degenerate-face", "face " + std::to_string(f) + " is degenerate");
  }
}

double TriangleMesh::face_area(int f) const {
  const auto& face = faces[f];
  const Vec3 e1 = vertices[face[1]] - vertices[face[0]];
  const Vec3 e2 = vertices[face[2]] - vertices[face[0]];
  return 0.5 * e1.cross(e2).norm();
}

Vec3 TriangleMesh::centroid() const {
  Vec3 c = Vec3::Zero();
  for (const Vec3& v : vertices) c += v;
  return c / static_cast<double>(vertices.size());
}

TriangleMesh apply_rigid_transform(const TriangleMesh& mesh, const RigidTransform& t) {
  TriangleMesh out;
  out.name = mesh.name;
  out.faces = mesh.faces;
  out.vertices.reserve(mesh.vertices.size());
  for (const Vec3& v : mesh.vertices) out.vertices.push_back(t.apply(v));
  return out;
}

std::vector<Polyline3> boundary_loops(const TriangleMesh& mesh) {
  // Edge census: boundary edges belong to exactly one face.
  std::unordered_map<uint64_t, int> edge_count;
  edge_count.reserve(mesh.faces.size() * 3);
  for (const auto& face : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      int a = face[k], b = face[(k + 1) % 3];
      int c = ++edge_count[edge_key(a, b)];
      if (c > 2)
        throw AnalysisError("non-manifold-edge",
                            "edge (" + std::to_string(std::min(a, b)) + "," +
                                std::to_string(std::max(a, b)) +
                                ") is shared by more than two faces");
    }
  }

  // Undirected adjacency over boundary edges.
  std::unordered_map<int, std::vector<int>> adjacency;
  for (const auto& face : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      int a = face[k], b = face[(k + 1) % 3];
      if (edge_count[edge_key(a, b)] == 1) {
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
      }
    }
  }
  // Deterministic walk order regardless of face ordering.
  std::vector<int> starts;
  starts.reserve(adjacency.size());
  for (auto& [v, nbrs] : adjacency) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    starts.push_back(v);
  }
  std::sort(starts.begin(), starts.end());

  std::unordered_map<uint64_t, bool> used_edge;
  std::vector<std::vector<int>> chains;
  for (int start : starts) {
    for (int first : adjacency[start]) {
      if (used_edge[edge_key(start, first)]) continue;
      std::vector<int> chain{start};
      int prev = start, cur = first;
      used_edge[edge_key(start, first)] = true;
      while (cur != start) {
        chain.push_back(cur);
        int next = -1;
        for (int nbr : adjacency[cur]) {
          if (nbr == prev) continue;
          if (!used_edge[edge_key(cur, nbr)]) { next = nbr; break; }
        }
        if (next < 0) break;  // open chain (pinched or inconsistent boundary)
        used_edge[edge_key(cur, next)] = true;
        prev = cur;
        cur = next;
      }
      chains.push_back(std::move(chain));
    }
  }

  std::vector<Polyline3> loops;
  for (const auto& chain : chains) {
    if (chain.size() < 2) continue;
    Polyline3 loop;
    loop.closed = true;
    loop.points.reserve(chain.size());
    for (int v : chain) loop.points.push_back(mesh.vertices[v]);
    loops.push_back(std::move(loop));
  }

  std::stable_sort(loops.begin(), loops.end(),
                   [](const Polyline3& a, const Polyline3& b) {
                     return a.length() > b.length();
                   });

  bool has_real_loop = std::any_of(loops.begin(), loops.end(), [](const Polyline3& l) {
    return l.points.size() >= kMinLoopPoints;
  });
  if (has_real_loop) {
    std::erase_if(loops, [](const Polyline3& l) { return l.points.size() < kMinLoopPoints; });
  }
  return loops;
}

}  // namespace vplate
