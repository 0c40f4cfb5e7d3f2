#include "vplate/contours.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include "vplate/errors.hpp"

namespace vplate {

namespace {

constexpr double kChainTolerance = 1e-6;  // mm, endpoint matching

struct QuantKey {
  std::array<int64_t, 3> q;
  bool operator==(const QuantKey&) const = default;
};

struct QuantKeyHash {
  size_t operator()(const QuantKey& k) const {
    uint64_t h = 1469598103934665603ull;
    for (int64_t v : k.q) {
      h ^= static_cast<uint64_t>(v);
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

struct NodeIndex {
  // Quantized endpoint lookup: points within the chaining tolerance share a node.
  std::unordered_map<QuantKey, int, QuantKeyHash> table;
  std::vector<Vec3> coords;

  int id_of(const Vec3& p) {
    QuantKey key{{static_cast<int64_t>(std::llround(p.x() / kChainTolerance)),
                  static_cast<int64_t>(std::llround(p.y() / kChainTolerance)),
                  static_cast<int64_t>(std::llround(p.z() / kChainTolerance))}};
    auto [it, inserted] = table.try_emplace(key, static_cast<int>(coords.size()));
    if (inserted) coords.push_back(p);
    return it->second;
  }
};

}  // namespace

std::vector<Polyline3> plane_mesh_intersection(const TriangleMesh& mesh,
                                               const Plane& plane) {
  NodeIndex nodes;
  std::vector<std::pair<int, int>> segments;

  auto add_segment = [&](const Vec3& a, const Vec3& b) {
    int ia = nodes.id_of(a), ib = nodes.id_of(b);
    if (ia != ib) segments.emplace_back(ia, ib);
  };

  for (const auto& face : mesh.faces) {
    const Vec3* v[3] = {&mesh.vertices[face[0]], &mesh.vertices[face[1]],
                        &mesh.vertices[face[2]]};
    double d[3];
    int zero_count = 0;
    for (int i = 0; i < 3; ++i) {
      d[i] = plane.signed_distance(*v[i]);
      if (d[i] == 0.0) ++zero_count;
    }

    if (zero_count == 3) {
      // coplanar triangle: its three edges are intersection segments
      add_segment(*v[0], *v[1]);
      add_segment(*v[1], *v[2]);
      add_segment(*v[2], *v[0]);
      continue;
    }
    if (zero_count == 2) {
      int a = -1, b = -1;
      for (int i = 0; i < 3; ++i)
        if (d[i] == 0.0) (a < 0 ? a : b) = i;
      add_segment(*v[a], *v[b]);
      continue;
    }
    if (zero_count == 1) {
      int z = 0;
      while (d[z] != 0.0) ++z;
      int a = (z + 1) % 3, b = (z + 2) % 3;
      if (d[a] * d[b] < 0.0) {
        double t = d[a] / (d[a] - d[b]);
        add_segment(*v[z], *v[a] + t * (*v[b] - *v[a]));
      }
      // same-side pair: plane only touches the vertex, no segment
      continue;
    }

    // generic case: two edges cross iff the signs are mixed
    Vec3 cross[2];
    int n = 0;
    for (int i = 0; i < 3 && n < 2; ++i) {
      int j = (i + 1) % 3;
      if (d[i] * d[j] < 0.0) {
        double t = d[i] / (d[i] - d[j]);
        cross[n++] = *v[i] + t * (*v[j] - *v[i]);
      }
    }
    if (n == 2) add_segment(cross[0], cross[1]);
  }

  // Drop duplicate segments (coplanar triangles sharing an edge emit it twice).
  std::sort(segments.begin(), segments.end(),
            [](auto a, auto b) {
              auto na = std::minmax(a.first, a.second);
              auto nb = std::minmax(b.first, b.second);
              return na < nb;
            });
  segments.erase(std::unique(segments.begin(), segments.end(),
                             [](auto a, auto b) {
                               return std::minmax(a.first, a.second) ==
                                      std::minmax(b.first, b.second);
                             }),
                 segments.end());

  // Chain segments sharing endpoints into polylines.
  std::unordered_map<int, std::vector<int>> adjacency;
  for (auto [a, b] : segments) {
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
  }
  for (auto& [n, nbrs] : adjacency) std::sort(nbrs.begin(), nbrs.end());

  std::vector<std::pair<int, int>> used;  // sorted unique edge ledger
  auto edge_used = [&](int a, int b) {
    auto e = std::minmax(a, b);
    return std::binary_search(used.begin(), used.end(), std::make_pair(e.first, e.second));
  };
  auto mark_used = [&](int a, int b) {
    auto e = std::minmax(a, b);
    used.insert(std::lower_bound(used.begin(), used.end(), std::make_pair(e.first, e.second)),
                {e.first, e.second});
  };

  auto walk = [&](int start, int first) {
    std::vector<int> chain{start};
    int prev = start, cur = first;
    mark_used(start, first);
    while (cur != start) {
      chain.push_back(cur);
      int next = -1;
      for (int nbr : adjacency[cur]) {
        if (nbr == prev && adjacency[cur].size() > 1) continue;
        if (!edge_used(cur, nbr)) { next = nbr; break; }
      }
      if (next < 0) break;
      mark_used(cur, next);
      prev = cur;
      cur = next;
    }
    return chain;
  };

  std::vector<int> order;
  order.reserve(adjacency.size());
  for (const auto& [n, nbrs] : adjacency) order.push_back(n);
  std::sort(order.begin(), order.end());

  std::vector<Polyline3> polylines;
  auto emit = [&](const std::vector<int>& chain, bool closed) {
    if (chain.size() < 2) return;
    Polyline3 line;
    line.closed = closed;
    line.points.reserve(chain.size());
    for (int n : chain) line.points.push_back(nodes.coords[n]);
    polylines.push_back(std::move(line));
  };

  // open chains start at odd-degree nodes
  for (int n : order) {
    if (adjacency[n].size() % 2 == 0) continue;
    for (int nbr : adjacency[n]) {
      if (edge_used(n, nbr)) continue;
      auto chain = walk(n, nbr);
      emit(chain, false);
    }
  }
  // remaining edges form cycles
  for (int n : order) {
    for (int nbr : adjacency[n]) {
      if (edge_used(n, nbr)) continue;
      auto chain = walk(n, nbr);
      emit(chain, chain.size() > 2);
    }
  }
  return polylines;
}

ContourSet contour_lines(const TriangleMesh& plate, double spacing,
                         const std::string& plate_id, PlateSide side) {
  if (!(spacing > 0.0))
    throw AnalysisError("invalid-argument", "contour spacing must be positive");

  ContourSet set;
  set.plate_id = plate_id;
  set.side = side;
  set.z_min = std::numeric_limits<double>::infinity();
  set.z_max = -std::numeric_limits<double>::infinity();
  for (const Vec3& v : plate.vertices) {
    set.z_min = std::min(set.z_min, v.z());
    set.z_max = std::max(set.z_max, v.z());
  }

  // Levels anchored at absolute multiples of the spacing, so that plates
  // sharing the symmetry-plane datum are directly comparable.
  const long k_lo = static_cast<long>(std::ceil(set.z_min / spacing - 1e-12));
  const long k_hi = static_cast<long>(std::floor(set.z_max / spacing + 1e-12));
  for (long k = k_lo; k <= k_hi; ++k) {
    ContourLevel level;
    level.z_level = static_cast<double>(k) * spacing;
    level.polylines = plane_mesh_intersection(plate, Plane::horizontal(level.z_level));
    set.levels.push_back(std::move(level));
  }
  return set;
}

std::string contour_set_csv(const ContourSet& contours) {
  std::ostringstream out;
  out << "plate_id,level_mm,polyline_index,point_index,x,y,z\n";
  char buf[160];
  for (const auto& level : contours.levels) {
    for (size_t li = 0; li < level.polylines.size(); ++li) {
      const auto& line = level.polylines[li];
      for (size_t pi = 0; pi < line.points.size(); ++pi) {
        const Vec3& p = line.points[pi];
        std::snprintf(buf, sizeof(buf), "%s,%.6f,%zu,%zu,%.6f,%.6f,%.6f\n",
                      contours.plate_id.c_str(), level.z_level, li, pi, p.x(),
                      p.y(), p.z());
        out << buf;
      }
    }
  }
  return out.str();
}

}  // namespace vplate
