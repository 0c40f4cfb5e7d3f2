#include "vplate/alignment.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "vplate/errors.hpp"

namespace vplate {

namespace {

Mat3 covariance_of(const std::vector<Vec3>& points, const Vec3& mean) {
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : points) {
    Vec3 d = p - mean;
    cov += d * d.transpose();
  }
  return cov / static_cast<double>(points.size());
}

Vec3 mean_of(const std::vector<Vec3>& points) {
  Vec3 m = Vec3::Zero();
  for (const Vec3& p : points) m += p;
  return m / static_cast<double>(points.size());
}

// Deterministic sign for an eigenvector: largest-magnitude component positive.
Vec3 sign_canonical(Vec3 v) {
  int imax = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
  return v[imax] < 0 ? Vec3(-v) : v;
}

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

}  // namespace

const std::vector<std::string>& AngleHistograms::histogram_names() {
  static const std::vector<std::string> names = {
      "sb_back_signed", "sym_horizontal", "sb_horizontal", "back_horizontal"};
  return names;
}

std::pair<TriangleMesh, RigidTransform> pca_align(const TriangleMesh& body) {
  if (body.vertices.size() < 3)
    throw AnalysisError("degenerate-pca", "fewer than 3 vertices");
  const Vec3 c = mean_of(body.vertices);
  const Mat3 cov = covariance_of(body.vertices, c);

  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);  // eigenvalues ascending
  const Vec3 evals = es.eigenvalues();
  if (evals[0] <= 1e-12 * std::max(evals[2], 1e-300))
    throw AnalysisError("degenerate-pca", "vertices are collinear or coplanar");

  Vec3 ax = es.eigenvectors().col(2);  // largest variance -> x
  Vec3 ay = sign_canonical(es.eigenvectors().col(1));

  // Deterministic sign for the main axis: skew of x-coordinates >= 0.
  double skew = 0.0;
  for (const Vec3& v : body.vertices) {
    double x = ax.dot(v - c);
    skew += x * x * x;
  }
  if (skew < 0) ax = -ax;
  Vec3 az = ax.cross(ay);  // right-handed, det = +1

  RigidTransform t;
  t.rotation.row(0) = ax;
  t.rotation.row(1) = ay;
  t.rotation.row(2) = az;
  t.translation = -(t.rotation * c);
  return {apply_rigid_transform(body, t), t};
}

std::pair<Plane, double> fit_plane_orthogonal(const std::vector<Vec3>& points) {
  if (points.size() < 3)
    throw AnalysisError("degenerate-plane-fit", "fewer than 3 points");
  const Vec3 c = mean_of(points);
  const Mat3 cov = covariance_of(points, c);
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  const Vec3 evals = es.eigenvalues();
  if (evals[1] <= 1e-12 * std::max(evals[2], 1e-300))
    throw AnalysisError("degenerate-plane-fit", "points are collinear");

  Plane plane;
  plane.normal = es.eigenvectors().col(0);  // smallest-variance direction
  plane.offset = plane.normal.dot(c);
  plane = plane.canonical();

  double ss = 0.0;
  for (const Vec3& p : points) {
    double d = plane.signed_distance(p);
    ss += d * d;
  }
  return {plane, std::sqrt(ss / static_cast<double>(points.size()))};
}

Plane bisector_plane(const Plane& a, const Plane& b, const Vec3& anchor) {
  if (1.0 + a.normal.dot(b.normal) <= 1e-12)
    throw AnalysisError("undefined-bisector", "planes are anti-parallel");
  Plane bb = b;
  if (a.normal.dot(b.normal) < 0.0) {
    bb.normal = -b.normal;
    bb.offset = -b.offset;
  }

  Plane result;
  result.normal = (a.normal + bb.normal).normalized();
  const Vec3 mid = 0.5 * (a.project(anchor) + bb.project(anchor));
  result.offset = result.normal.dot(mid);
  return result.canonical();
}

double dihedral_angle(const Plane& a, const Plane& b) {
  double c = std::clamp(std::abs(a.normal.dot(b.normal)), 0.0, 1.0);
  return deg_from_rad(std::acos(c));
}

double signed_parallelism_angle(const Plane& sb_plane, const Plane& back_plane,
                                const Vec2& neck_direction) {
  const double magnitude = dihedral_angle(sb_plane, back_plane);
  if (magnitude == 0.0) return 0.0;

  // Near-horizontal planes as height fields z(x, y); the in-plane gradient of
  // the vertical gap decides the sign: gap growing toward the neck means the
  // plates are closer at the bottom.
  auto gradient = [](const Plane& p) -> Vec2 {
    const double nz = p.normal.z();
    if (std::abs(nz) < 1e-12) return Vec2::Zero();
    return Vec2(-p.normal.x() / nz, -p.normal.y() / nz);
  };
  const Vec2 gap_grad = gradient(sb_plane) - gradient(back_plane);
  const double s = gap_grad.dot(neck_direction);
  if (s < 0.0) return -magnitude;
  return magnitude;
}

AlignedPair align_to_symmetry_plane(const TriangleMesh& sound_board,
                                    const TriangleMesh& back) {
  auto sb_loops = boundary_loops(sound_board);
  auto back_loops = boundary_loops(back);
  if (sb_loops.empty() || back_loops.empty())
    throw AnalysisError("no-boundary", "plate mesh has no boundary loop");

  const auto& sb_contour = sb_loops.front().points;    // longest loop
  const auto& back_contour = back_loops.front().points;

  auto [sb_plane, sb_res] = fit_plane_orthogonal(sb_contour);
  auto [back_plane, back_res] = fit_plane_orthogonal(back_contour);

  const Vec3 anchor = 0.5 * (mean_of(sb_contour) + mean_of(back_contour));
  const Plane sym = bisector_plane(sb_plane, back_plane, anchor);

  // Rotation taking the bisector normal to +z about normal x z.
  RigidTransform t;
  const Vec3 n = sym.normal;
  const Vec3 axis = n.cross(Vec3::UnitZ());
  const double s = axis.norm();
  const double c = n.z();
  if (s > 1e-15) {
    t.rotation = Eigen::AngleAxisd(std::atan2(s, c), axis / s).toRotationMatrix();
  }
  // A rotated plane keeps its offset; push it to 0.
  t.translation = Vec3(0, 0, -sym.offset);

  TriangleMesh sb_out = apply_rigid_transform(sound_board, t);
  TriangleMesh back_out = apply_rigid_transform(back, t);

  auto mean_z = [](const TriangleMesh& m) {
    double z = 0.0;
    for (const Vec3& v : m.vertices) z += v.z();
    return z / static_cast<double>(m.vertices.size());
  };
  if (mean_z(sb_out) < 0.0) {
    // Sound board below the plane: flip 180 degrees about x (keeps z=0 fixed).
    RigidTransform flip;
    flip.rotation = Eigen::AngleAxisd(EIGEN_PI, Vec3::UnitX()).toRotationMatrix();
    t = flip.compose(t);
    sb_out = apply_rigid_transform(sound_board, t);
    back_out = apply_rigid_transform(back, t);
  }

  AlignedPair pair;
  pair.sound_board = std::move(sb_out);
  pair.back = std::move(back_out);
  pair.transform = t;
  pair.symmetry_plane_before = sym;
  pair.sound_board_plane_before = sb_plane;
  pair.back_plane_before = back_plane;
  pair.sound_board_residual_mm = sb_res;
  pair.back_residual_mm = back_res;
  return pair;
}

AngleHistograms angle_report(const std::vector<AngleRecord>& records,
                             double bin_width_deg) {
  if (!(bin_width_deg > 0.0))
    throw AnalysisError("invalid-argument", "bin width must be positive");
  AngleHistograms h;
  h.bin_width_deg = bin_width_deg;
  for (const auto& name : AngleHistograms::histogram_names()) h.bins[name];

  std::vector<AngleRecord> sorted = records;
  std::sort(sorted.begin(), sorted.end(),
            [](const AngleRecord& a, const AngleRecord& b) {
              return a.instrument_id < b.instrument_id;
            });

  auto bin_of = [bin_width_deg](double angle) {
    return static_cast<int>(std::floor(angle / bin_width_deg));
  };
  for (const AngleRecord& r : sorted) {
    h.bins["sb_back_signed"][bin_of(r.sb_back_signed)].push_back(r.instrument_id);
    h.bins["sym_horizontal"][bin_of(r.sym_horizontal)].push_back(r.instrument_id);
    h.bins["sb_horizontal"][bin_of(r.sb_horizontal)].push_back(r.instrument_id);
    h.bins["back_horizontal"][bin_of(r.back_horizontal)].push_back(r.instrument_id);
  }
  return h;
}

std::string angle_histograms_csv(const AngleHistograms& h) {
  std::ostringstream out;
  out << "histogram,bin_low_deg,bin_high_deg,count,ids\n";
  for (const auto& [name, bins] : h.bins) {
    for (const auto& [k, ids] : bins) {
      out << name << ',' << fmt(k * h.bin_width_deg) << ','
          << fmt((k + 1) * h.bin_width_deg) << ',' << ids.size() << ',';
      for (size_t i = 0; i < ids.size(); ++i) {
        if (i) out << ';';
        out << ids[i];
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string angle_histogram_svg(const AngleHistograms& h, const std::string& name) {
  auto it = h.bins.find(name);
  if (it == h.bins.end())
    throw AnalysisError("invalid-argument", "unknown histogram '" + name + "'");
  const auto& bins = it->second;

  int kmin = 0, kmax = 0;
  size_t max_count = 1;
  if (!bins.empty()) {
    kmin = bins.begin()->first;
    kmax = bins.rbegin()->first;
    for (const auto& [k, ids] : bins) max_count = std::max(max_count, ids.size());
  }
  const double bar_w = 28.0, bar_h = 24.0;
  const double margin = 60.0;
  const int nbins = kmax - kmin + 1;
  const double width = margin * 2 + nbins * bar_w;
  const double height = margin * 2 + static_cast<double>(max_count) * bar_h;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width, 1)
      << "\" height=\"" << fmt(height, 1) << "\" viewBox=\"0 0 " << fmt(width, 1)
      << " " << fmt(height, 1) << "\">\n";
  svg << "<title>" << name << "</title>\n";
  svg << "<line x1=\"" << fmt(margin, 1) << "\" y1=\"" << fmt(height - margin, 1)
      << "\" x2=\"" << fmt(width - margin, 1) << "\" y2=\"" << fmt(height - margin, 1)
      << "\" stroke=\"black\"/>\n";
  for (const auto& [k, ids] : bins) {
    const double x = margin + (k - kmin) * bar_w;
    const double bh = static_cast<double>(ids.size()) * bar_h;
    const double y = height - margin - bh;
    svg << "<rect x=\"" << fmt(x + 1, 1) << "\" y=\"" << fmt(y, 1) << "\" width=\""
        << fmt(bar_w - 2, 1) << "\" height=\"" << fmt(bh, 1)
        << "\" fill=\"#4878cf\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    // stack the instrument ids inside the bar, one per slot
    for (size_t i = 0; i < ids.size(); ++i) {
      const double ty = height - margin - (static_cast<double>(i) + 0.35) * bar_h;
      svg << "<text x=\"" << fmt(x + bar_w / 2, 1) << "\" y=\"" << fmt(ty, 1)
          << "\" font-size=\"8\" text-anchor=\"middle\">" << ids[i] << "</text>\n";
    }
    svg << "<text x=\"" << fmt(x, 1) << "\" y=\"" << fmt(height - margin + 12, 1)
        << "\" font-size=\"8\" text-anchor=\"middle\">" << fmt(k * h.bin_width_deg, 2)
        << "</text>\n";
  }
  svg << "<text x=\"" << fmt(width / 2, 1) << "\" y=\"" << fmt(margin / 2, 1)
      << "\" font-size=\"12\" text-anchor=\"middle\">" << name
      << " (deg, bins of " << fmt(h.bin_width_deg, 2) << ")</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace vplate
