#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace shapepose {

/// Exact nearest-neighbor index over a fixed 3D point set. The tree keeps a
/// copy of the points, so the source may go out of scope.
class KdTree {
public:
  explicit KdTree(std::span<const Eigen::Vector3d> points);

  struct Hit {
    std::size_t index = 0;
    double squared_distance = 0.0;
  };

  /// Nearest stored point. Distances are computed as (q - p).squaredNorm(),
  /// bit-identical to a brute-force scan over the same points.
  Hit nearest(const Eigen::Vector3d& query) const;

  std::size_t size() const { return points_.size(); }

private:
  struct Node {
    // Leaf when axis < 0: [begin, end) into order_.
    int axis = -1;
    double split = 0.0;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::uint32_t node, const Eigen::Vector3d& q, Hit& best) const;

  std::vector<Eigen::Vector3d> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace shapepose
