#include "shapepose/icp.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "shapepose/errors.hpp"
#include "shapepose/kdtree.hpp"

namespace shapepose {

PointList RigidTransform::apply(std::span<const Eigen::Vector3d> pts) const {
  PointList out;
  out.reserve(pts.size());
  const Eigen::Matrix3d r = rotation.matrix();
  for (const auto& p : pts) out.push_back(r * p + translation);
  return out;
}

RigidTransform RigidTransform::operator*(const RigidTransform& b) const {
  return {rotation * b.rotation, rotation * b.translation + translation};
}

RigidTransform RigidTransform::inverse() const {
  const Rotation r = rotation.inverse();
  return {r, -(r * translation)};
}

void require_non_collinear(std::span<const Eigen::Vector3d> pts, const char* what) {
  if (pts.size() < 3) {
    throw Error(ErrorKind::DegenerateGeometry, std::string(what) + ": fewer than 3 points");
  }
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) cov += (p - c) * (p - c).transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov);
  const auto s = svd.singularValues();
  if (!(s[1] > 1e-12 * std::max(s[0], 1e-300))) {
    throw Error(ErrorKind::DegenerateGeometry, std::string(what) + ": points are collinear");
  }
}

RigidTransform procrustes(std::span<const Eigen::Vector3d> src,
                          std::span<const Eigen::Vector3d> dst) {
  if (src.size() != dst.size()) {
    throw Error(ErrorKind::DimensionMismatch, "procrustes needs paired point lists");
  }
  require_non_collinear(src, "procrustes source");
  Eigen::Vector3d cs = Eigen::Vector3d::Zero(), cd = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    cs += src[i];
    cd += dst[i];
  }
  cs /= static_cast<double>(src.size());
  cd /= static_cast<double>(dst.size());
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) h += (dst[i] - cd) * (src[i] - cs).transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d& u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  const Eigen::Vector3d d(1.0, 1.0, (u * v.transpose()).determinant() < 0.0 ? -1.0 : 1.0);
  const Eigen::Matrix3d r = u * d.asDiagonal() * v.transpose();
  RigidTransform out;
  out.rotation = Rotation::from_matrix(r);
  out.translation = cd - out.rotation * cs;
  return out;
}

IcpResult icp_align(std::span<const Eigen::Vector3d> src, std::span<const Eigen::Vector3d> dst,
                    const IcpParams& params) {
  require_non_collinear(src, "ICP source");
  require_non_collinear(dst, "ICP target");
  const KdTree tree(dst);

  IcpResult result;
  PointList moved(src.begin(), src.end());
  PointList matched(src.size());
  auto correspond = [&]() {
    double sq = 0.0;
    for (std::size_t i = 0; i < moved.size(); ++i) {
      const auto hit = tree.nearest(moved[i]);
      matched[i] = dst[hit.index];
      sq += hit.squared_distance;
    }
    return std::sqrt(sq / static_cast<double>(moved.size()));
  };

  double rms = correspond();
  result.rms_history.push_back(rms);
  for (int it = 0; it < params.max_iters; ++it) {
    const RigidTransform step = procrustes(moved, matched);
    result.transform = step * result.transform;
    moved = result.transform.apply(src);
    result.iterations = it + 1;
    const double next = correspond();
    result.rms_history.push_back(next);
    const double change = std::abs(rms - next);
    rms = next;
    if (change < params.tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace shapepose
