#include "shapepose/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "shapepose/errors.hpp"

namespace shapepose {

void TriMesh::validate() const {
  for (const auto& t : triangles) {
    for (auto i : t) {
      if (i >= vertices.size()) {
        throw Error(ErrorKind::DegenerateMesh, "triangle index out of range");
      }
    }
  }
}

double TriMesh::area() const {
  double total = 0.0;
  for (const auto& t : triangles) {
    total += 0.5 * (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]).norm();
  }
  return total;
}

TriMesh transformed(const TriMesh& m, const Sim3Pose& pose) {
  TriMesh out;
  out.vertices = sim3_apply(pose, m.vertices);
  out.triangles = m.triangles;
  return out;
}

SampledSurface sample_surface(const TriMesh& m, std::size_t n, std::uint64_t seed) {
  m.validate();
  std::vector<double> cdf(m.triangles.size());
  double total = 0.0;
  for (std::size_t i = 0; i < m.triangles.size(); ++i) {
    const auto& t = m.triangles[i];
    total += 0.5 * (m.vertices[t[1]] - m.vertices[t[0]])
                       .cross(m.vertices[t[2]] - m.vertices[t[0]])
                       .norm();
    cdf[i] = total;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw Error(ErrorKind::DegenerateMesh, "mesh has zero surface area");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SampledSurface out;
  out.seed = seed;
  out.points.reserve(n);
  out.triangle.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double pick = unit(rng) * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), pick);
    if (it == cdf.end()) --it;
    // upper_bound never lands on a zero-area triangle: its cdf equals its predecessor's.
    const auto tri = static_cast<std::uint32_t>(it - cdf.begin());
    double r1 = unit(rng);
    double r2 = unit(rng);
    if (r1 + r2 > 1.0) {
      r1 = 1.0 - r1;
      r2 = 1.0 - r2;
    }
    const auto& t = m.triangles[tri];
    const Eigen::Vector3d& a = m.vertices[t[0]];
    out.points.push_back(a + r1 * (m.vertices[t[1]] - a) + r2 * (m.vertices[t[2]] - a));
    out.triangle.push_back(tri);
  }
  return out;
}

TriMesh make_box(const Eigen::Vector3d& extents) {
  const Eigen::Vector3d h = 0.5 * extents;
  TriMesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(),
                            (i & 4) ? h.z() : -h.z());
  }
  m.triangles = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                 {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return m;
}

TriMesh make_uv_sphere(double radius, int rings, int segments) {
  TriMesh m;
  const double pi = std::acos(-1.0);
  m.vertices.emplace_back(0.0, 0.0, radius);
  for (int r = 1; r < rings; ++r) {
    const double theta = pi * r / rings;
    for (int s = 0; s < segments; ++s) {
      const double phi = 2.0 * pi * s / segments;
      m.vertices.emplace_back(radius * std::sin(theta) * std::cos(phi),
                              radius * std::sin(theta) * std::sin(phi), radius * std::cos(theta));
    }
  }
  m.vertices.emplace_back(0.0, 0.0, -radius);
  const auto south = static_cast<std::uint32_t>(m.vertices.size() - 1);
  auto ring = [segments](int r, int s) {
    return static_cast<std::uint32_t>(1 + (r - 1) * segments + (s % segments));
  };
  for (int s = 0; s < segments; ++s) m.triangles.push_back({0, ring(1, s), ring(1, s + 1)});
  for (int r = 1; r + 1 < rings; ++r) {
    for (int s = 0; s < segments; ++s) {
      m.triangles.push_back({ring(r, s), ring(r + 1, s), ring(r + 1, s + 1)});
      m.triangles.push_back({ring(r, s), ring(r + 1, s + 1), ring(r, s + 1)});
    }
  }
  for (int s = 0; s < segments; ++s) {
    m.triangles.push_back({ring(rings - 1, s), south, ring(rings - 1, s + 1)});
  }
  return m;
}

}  // namespace shapepose
