#include "shapepose/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shapepose/errors.hpp"
#include "shapepose/kdtree.hpp"

namespace shapepose {

double diameter(std::span<const Eigen::Vector3d> pts) {
  if (pts.size() < 2) throw Error(ErrorKind::TooFewPoints, "diameter needs at least 2 points");
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());

  std::vector<std::pair<double, std::size_t>> by_radius(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) by_radius[i] = {(pts[i] - c).norm(), i};
  std::sort(by_radius.begin(), by_radius.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  // |p - q| <= r_p + r_q, so once r_i + r_j cannot exceed the best squared
  // distance found so far the remaining pairs are skipped. A relative margin
  // absorbs rounding in the radius bound.
  double best_sq = 0.0;
  for (std::size_t i = 0; i < by_radius.size(); ++i) {
    const double ri = by_radius[i].first;
    const Eigen::Vector3d& pi = pts[by_radius[i].second];
    for (std::size_t j = i + 1; j < by_radius.size(); ++j) {
      const double bound = (ri + by_radius[j].first) * (1.0 + 1e-12);
      if (bound * bound < best_sq) break;
      best_sq = std::max(best_sq, (pi - pts[by_radius[j].second]).squaredNorm());
    }
    if (i + 1 < by_radius.size()) {
      const double bound = (ri + by_radius[i + 1].first) * (1.0 + 1e-12);
      if (bound * bound < best_sq) break;
    }
  }
  return std::sqrt(best_sq);
}

double add_s_directional(std::span<const Eigen::Vector3d> a, std::span<const Eigen::Vector3d> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::EmptyCloud, "ADD-S on an empty cloud");
  const KdTree tree(b);
  double sum = 0.0;
  for (const auto& p : a) sum += std::sqrt(tree.nearest(p).squared_distance);
  return sum / static_cast<double>(a.size());
}

double add_sb_points(std::span<const Eigen::Vector3d> pred, std::span<const Eigen::Vector3d> gt) {
  return 0.5 * (add_s_directional(pred, gt) + add_s_directional(gt, pred));
}

double add_sb(const TriMesh& pred_mesh, const Sim3Pose& pred_pose, const TriMesh& gt_mesh,
              const Sim3Pose& gt_pose, std::size_t n, std::uint64_t seed) {
  const PointList p = sim3_apply(pred_pose, sample_surface(pred_mesh, n, seed).points);
  const PointList g = sim3_apply(gt_pose, sample_surface(gt_mesh, n, seed).points);
  return add_sb_points(p, g);
}

double add_sb_recall(std::span<const AddSbSample> values, double threshold_fraction) {
  if (values.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& v : values) {
    if (!(v.gt_diameter > 0.0)) {
      throw Error(ErrorKind::NonPositiveDiameter, "ADD-SB recall needs positive diameters");
    }
    if (v.add_sb < threshold_fraction * v.gt_diameter) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(values.size());
}

double dre(double d_pred, double d_gt) {
  if (!(d_gt > 0.0)) throw Error(ErrorKind::NonPositiveDiameter, "GT diameter must be positive");
  return std::abs(d_pred - d_gt) / d_gt;
}

double dre_recall(std::span<const double> errors, double tau) {
  if (errors.empty()) return 0.0;
  const auto hits = std::count_if(errors.begin(), errors.end(), [tau](double e) { return e < tau; });
  return static_cast<double>(hits) / static_cast<double>(errors.size());
}

double symmetric_chamfer(std::span<const Eigen::Vector3d> a, std::span<const Eigen::Vector3d> b) {
  return 0.5 * (add_s_directional(a, b) + add_s_directional(b, a));
}

double chamfer_normalized(const TriMesh& pred, const TriMesh& gt, double gt_diameter,
                          std::size_t n, std::uint64_t seed, const IcpParams& icp) {
  if (!(gt_diameter > 0.0)) {
    throw Error(ErrorKind::NonPositiveDiameter, "Chamfer normalization needs a positive diameter");
  }
  PointList p = sample_surface(pred, n, seed).points;
  const PointList g = sample_surface(gt, n, seed).points;
  if (icp.max_iters > 0) p = icp_align(p, g, icp).transform.apply(p);
  return symmetric_chamfer(p, g) / gt_diameter;
}

double occlusion_fraction(const BinaryMask& visible, const BinaryMask& amodal) {
  if (visible.width != amodal.width || visible.height != amodal.height) {
    throw Error(ErrorKind::DimensionMismatch, "visible and amodal masks differ in size");
  }
  std::size_t n_amodal = 0, n_visible = 0;
  for (std::size_t i = 0; i < amodal.data.size(); ++i) {
    const bool a = amodal.data[i] != 0;
    const bool v = visible.data[i] != 0;
    if (v && !a) {
      throw Error(ErrorKind::MaskInconsistency, "visible pixel outside the amodal mask");
    }
    n_amodal += a;
    n_visible += v;
  }
  if (n_amodal == 0) throw Error(ErrorKind::EmptyAmodal, "amodal mask is empty");
  return static_cast<double>(n_amodal - n_visible) / static_cast<double>(n_amodal);
}

OcclusionBin occlusion_bin(double f) {
  if (f < 0.03) return OcclusionBin::Visible;
  if (f < 0.20) return OcclusionBin::Low;
  if (f < 0.40) return OcclusionBin::Medium;
  if (f <= 0.70) return OcclusionBin::High;
  return OcclusionBin::OutOfRange;
}

const char* occlusion_bin_label(OcclusionBin b) {
  switch (b) {
    case OcclusionBin::Visible: return "0-3%";
    case OcclusionBin::Low: return "3-20%";
    case OcclusionBin::Medium: return "20-40%";
    case OcclusionBin::High: return "40-70%";
    case OcclusionBin::OutOfRange: return ">70%";
  }
  return "?";
}

}  // namespace shapepose
