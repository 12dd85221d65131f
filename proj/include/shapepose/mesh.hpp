#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shapepose/pose.hpp"

namespace shapepose {

/// Triangle mesh, vertices in meters in the object frame.
struct TriMesh {
  PointList vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  /// Throws DegenerateMesh when an index is out of range.
  void validate() const;
  double area() const;
};

/// Applies the pose to every vertex; topology is unchanged.
TriMesh transformed(const TriMesh& m, const Sim3Pose& pose);

struct SampledSurface {
  PointList points;
  /// Triangle each point was drawn from.
  std::vector<std::uint32_t> triangle;
  std::uint64_t seed = 0;
};

/// Area-weighted triangle choice, uniform barycentric inside the triangle.
SampledSurface sample_surface(const TriMesh& m, std::size_t n, std::uint64_t seed);

/// Closed axis-aligned box mesh centered at the origin (12 triangles, outward winding).
TriMesh make_box(const Eigen::Vector3d& extents);
/// Icosphere-like UV sphere.
TriMesh make_uv_sphere(double radius, int rings, int segments);

/// PLY (ASCII or binary) and OBJ; polygons are fan-triangulated (0-1-2, 0-2-3, ...).
TriMesh load_mesh(const std::string& path);
/// ASCII PLY with vertices printed at full precision.
void save_ply(const std::string& path, const TriMesh& m);

}  // namespace shapepose
