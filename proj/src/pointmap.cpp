#include "shapepose/pointmap.hpp"

#include <algorithm>
#include <cmath>

#include "shapepose/errors.hpp"
#include "shapepose/robust_stats.hpp"

namespace shapepose {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0 && fy > 0.0)) {
    throw Error(ErrorKind::DegenerateInput, "focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::DegenerateInput, "image dimensions must be positive");
  }
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    throw Error(ErrorKind::DegenerateInput, "principal point lies outside the image");
  }
}

DepthImage::DepthImage(int w, int h)
    : width(w), height(h), depth(static_cast<std::size_t>(w) * h, 0.0),
      valid(static_cast<std::size_t>(w) * h, 0) {}

BinaryMask::BinaryMask(int w, int h, bool fill)
    : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count_if(data.begin(), data.end(),
                                                 [](std::uint8_t b) { return b != 0; }));
}

Pointmap::Pointmap(int w, int h)
    : width(w), height(h), points(static_cast<std::size_t>(w) * h, Eigen::Vector3d::Zero()),
      valid(static_cast<std::size_t>(w) * h, 0) {}

std::size_t Pointmap::valid_count() const {
  return static_cast<std::size_t>(std::count_if(valid.begin(), valid.end(),
                                                 [](std::uint8_t b) { return b != 0; }));
}

PointList Pointmap::valid_points() const {
  PointList out;
  out.reserve(valid_count());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (valid[i]) out.push_back(points[i]);
  }
  return out;
}

Sim3Pose ObjectNormalization::to_metric() const {
  return Sim3Pose(Rotation::identity(), center, scale);
}

Pointmap backproject(const DepthImage& depth, const CameraIntrinsics& k) {
  if (depth.width != k.width || depth.height != k.height ||
      depth.depth.size() != static_cast<std::size_t>(depth.width) * depth.height) {
    throw Error(ErrorKind::DimensionMismatch, "depth image does not match camera intrinsics");
  }
  Pointmap out(depth.width, depth.height);
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      const std::size_t i = depth.index(u, v);
      const double z = depth.depth[i];
      if (!depth.valid[i] || !(z > 0.0)) continue;
      out.points[i] = Eigen::Vector3d((u - k.cx) * z / k.fx, (v - k.cy) * z / k.fy, z);
      out.valid[i] = 1;
    }
  }
  return out;
}

Pointmap mask_pointmap(const Pointmap& p, const BinaryMask& m) {
  if (p.width != m.width || p.height != m.height) {
    throw Error(ErrorKind::DimensionMismatch, "mask does not match pointmap dimensions");
  }
  Pointmap out = p;
  for (std::size_t i = 0; i < out.valid.size(); ++i) {
    if (!m.data[i]) {
      out.valid[i] = 0;
      out.points[i].setZero();
    }
  }
  return out;
}

ObjectNormalization robust_normalization(const Pointmap& p_obj) {
  const PointList pts = p_obj.valid_points();
  if (pts.size() < 20) {
    throw Error(ErrorKind::TooFewPoints,
                "robust normalization needs 20 valid points, got " + std::to_string(pts.size()));
  }
  ObjectNormalization n;
  std::vector<double> coord(pts.size());
  for (int d = 0; d < 3; ++d) {
    for (std::size_t i = 0; i < pts.size(); ++i) coord[i] = pts[i][d];
    n.center[d] = stats::median(coord);
  }
  std::vector<double> dist(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) dist[i] = (pts[i] - n.center).norm();
  std::sort(dist.begin(), dist.end());
  n.scale = stats::percentile_sorted(dist, 0.95) - stats::percentile_sorted(dist, 0.05);
  if (!(n.scale > 0.0)) {
    throw Error(ErrorKind::ZeroScale, "object points have zero percentile spread");
  }
  return n;
}

Pointmap normalize_pointmap(const Pointmap& p_obj, const ObjectNormalization& n) {
  if (!(n.scale > 0.0)) {
    throw Error(ErrorKind::ZeroScale, "normalization scale must be positive");
  }
  Pointmap out = p_obj;
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    if (out.valid[i]) out.points[i] = (out.points[i] - n.center) / n.scale;
  }
  return out;
}

CropBox dynamic_crop_box(const BinaryMask& m, double padding_fraction) {
  if (!(padding_fraction >= 0.0)) {
    throw Error(ErrorKind::DegenerateInput, "padding fraction must be non-negative");
  }
  CropBox tight{m.width, m.height, -1, -1};
  for (int v = 0; v < m.height; ++v) {
    for (int u = 0; u < m.width; ++u) {
      if (!m.at(u, v)) continue;
      tight.u0 = std::min(tight.u0, u);
      tight.v0 = std::min(tight.v0, v);
      tight.u1 = std::max(tight.u1, u + 1);
      tight.v1 = std::max(tight.v1, v + 1);
    }
  }
  if (tight.u1 < 0) throw Error(ErrorKind::EmptyMask, "crop box of an empty mask");

  const double pad_u = padding_fraction * (tight.u1 - tight.u0);
  const double pad_v = padding_fraction * (tight.v1 - tight.v0);
  CropBox out;
  out.u0 = std::max(0, static_cast<int>(std::floor(tight.u0 - pad_u)));
  out.v0 = std::max(0, static_cast<int>(std::floor(tight.v0 - pad_v)));
  out.u1 = std::min(m.width, static_cast<int>(std::ceil(tight.u1 + pad_u)));
  out.v1 = std::min(m.height, static_cast<int>(std::ceil(tight.v1 + pad_v)));
  return out;
}

}  // namespace shapepose
