#include "shapepose/kdtree.hpp"

#include <algorithm>
#include <limits>

#include "shapepose/errors.hpp"

namespace shapepose {

namespace {
constexpr std::uint32_t kLeafSize = 12;
}

KdTree::KdTree(std::span<const Eigen::Vector3d> points) : points_(points.begin(), points.end()) {
  if (points_.empty()) throw Error(ErrorKind::EmptyCloud, "cannot index an empty point set");
  order_.resize(points_.size());
  for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  build(0, static_cast<std::uint32_t>(order_.size()));
}

std::uint32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(Node{});
  nodes_[id].begin = begin;
  nodes_[id].end = end;
  if (end - begin <= kLeafSize) return id;

  Eigen::Vector3d lo = points_[order_[begin]];
  Eigen::Vector3d hi = lo;
  for (std::uint32_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] == lo[axis]) return id;  // all points coincide

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return points_[a][axis] < points_[b][axis];
                   });
  const double split = points_[order_[mid]][axis];
  const std::uint32_t left = build(begin, mid);
  const std::uint32_t right = build(mid, end);
  Node& n = nodes_[id];
  n.axis = axis;
  n.split = split;
  n.left = left;
  n.right = right;
  return id;
}

KdTree::Hit KdTree::nearest(const Eigen::Vector3d& query) const {
  Hit best;
  best.squared_distance = std::numeric_limits<double>::infinity();
  search(0, query, best);
  return best;
}

void KdTree::search(std::uint32_t id, const Eigen::Vector3d& q, Hit& best) const {
  const Node& n = nodes_[id];
  if (n.axis < 0) {
    for (std::uint32_t i = n.begin; i < n.end; ++i) {
      const std::uint32_t p = order_[i];
      const double d = (q - points_[p]).squaredNorm();
      if (d < best.squared_distance || (d == best.squared_distance && p < best.index)) {
        best.squared_distance = d;
        best.index = p;
      }
    }
    return;
  }
  // Left holds values <= split, right holds values >= split.
  const double diff = q[n.axis] - n.split;
  const std::uint32_t near = diff < 0.0 ? n.left : n.right;
  const std::uint32_t far = diff < 0.0 ? n.right : n.left;
  search(near, q, best);
  if (diff * diff <= best.squared_distance) search(far, q, best);
}

}  // namespace shapepose
