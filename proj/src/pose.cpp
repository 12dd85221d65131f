#include "shapepose/pose.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <Eigen/SVD>

#include "shapepose/errors.hpp"

namespace shapepose {

namespace {

Eigen::Quaterniond canonical(const Eigen::Quaterniond& q) {
  Eigen::Quaterniond n = q.normalized();
  if (n.w() < 0.0) n.coeffs() = -n.coeffs();
  return n;
}

std::string component_name(std::size_t i, std::size_t rot_width) {
  static const char* tail[] = {"t_x", "t_y", "t_z", "s"};
  if (i < rot_width) return "rho_" + std::to_string(i);
  return tail[i - rot_width];
}

void check_layout(std::size_t size, const PoseStats& stats) {
  if (stats.mean.size() != stats.width() || stats.stddev.size() != stats.width()) {
    throw Error(ErrorKind::LayoutMismatch, "pose statistics do not match their rotation layout");
  }
  if (size != stats.width()) {
    throw Error(ErrorKind::LayoutMismatch,
                "pose vector has " + std::to_string(size) + " entries, statistics expect " +
                    std::to_string(stats.width()));
  }
}

}  // namespace

Rotation::Rotation(const Eigen::Quaterniond& q) : q_(canonical(q)) {}

Rotation Rotation::from_matrix(const Eigen::Matrix3d& m) {
  return Rotation(Eigen::Quaterniond(m));
}

Rotation Rotation::from_axis_angle(const Eigen::Vector3d& axis, double angle_rad) {
  return Rotation(Eigen::Quaterniond(Eigen::AngleAxisd(angle_rad, axis.normalized())));
}

double Rotation::angular_distance(const Rotation& other) const {
  // |<q1, q2>| handles the double cover; atan2 form stays accurate near zero.
  const Eigen::Quaterniond d = q_.conjugate() * other.q_;
  return 2.0 * std::atan2(d.vec().norm(), std::abs(d.w()));
}

Rotation rot_from_6d(const Rotation6D& r6) {
  const Eigen::Vector3d a1(r6[0], r6[1], r6[2]);
  const Eigen::Vector3d a2(r6[3], r6[4], r6[5]);
  const double n1 = a1.norm();
  if (!(n1 > 1e-12)) {
    throw Error(ErrorKind::DegenerateInput, "6D rotation has a vanishing first column");
  }
  const Eigen::Vector3d b1 = a1 / n1;
  const Eigen::Vector3d u2 = a2 - b1.dot(a2) * b1;
  const double n2 = u2.norm();
  if (!(n2 > 1e-12)) {
    throw Error(ErrorKind::DegenerateInput, "6D rotation columns are parallel");
  }
  const Eigen::Vector3d b2 = u2 / n2;
  Eigen::Matrix3d m;
  m.col(0) = b1;
  m.col(1) = b2;
  m.col(2) = b1.cross(b2);
  return Rotation::from_matrix(m);
}

Rotation6D rot_to_6d(const Rotation& r) {
  const Eigen::Matrix3d m = r.matrix();
  return {m(0, 0), m(1, 0), m(2, 0), m(0, 1), m(1, 1), m(2, 1)};
}

Rotation rot_from_9d(const Rotation9D& r9) {
  Eigen::Matrix3d m;
  m << r9[0], r9[1], r9[2], r9[3], r9[4], r9[5], r9[6], r9[7], r9[8];
  if (!m.allFinite()) {
    throw Error(ErrorKind::DegenerateInput, "9D rotation has non-finite entries");
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (!(svd.singularValues().minCoeff() > 1e-12)) {
    throw Error(ErrorKind::DegenerateInput, "9D rotation matrix is rank deficient");
  }
  const Eigen::Matrix3d& u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  Eigen::Vector3d d(1.0, 1.0, (u * v.transpose()).determinant() < 0.0 ? -1.0 : 1.0);
  return Rotation::from_matrix(u * d.asDiagonal() * v.transpose());
}

Rotation9D rot_to_9d(const Rotation& r) {
  const Eigen::Matrix3d m = r.matrix();
  return {m(0, 0), m(0, 1), m(0, 2), m(1, 0), m(1, 1), m(1, 2), m(2, 0), m(2, 1), m(2, 2)};
}

Sim3Pose::Sim3Pose(const Rotation& r, const Eigen::Vector3d& t, double s)
    : rotation(r), translation(t), scale(s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw Error(ErrorKind::DegenerateInput, "Sim(3) scale must be positive and finite");
  }
}

PointList sim3_apply(const Sim3Pose& p, std::span<const Eigen::Vector3d> pts) {
  PointList out;
  out.reserve(pts.size());
  const Eigen::Matrix3d sr = p.scale * p.rotation.matrix();
  for (const auto& x : pts) out.push_back(sr * x + p.translation);
  return out;
}

Sim3Pose sim3_compose(const Sim3Pose& a, const Sim3Pose& b) {
  return Sim3Pose(a.rotation * b.rotation, a.scale * (a.rotation * b.translation) + a.translation,
                  a.scale * b.scale);
}

Sim3Pose sim3_inverse(const Sim3Pose& p) {
  const Rotation r_inv = p.rotation.inverse();
  const double s_inv = 1.0 / p.scale;
  return Sim3Pose(r_inv, -s_inv * (r_inv * p.translation), s_inv);
}

std::vector<double> pose_to_params(const Sim3Pose& p, RotationLayout layout) {
  std::vector<double> out;
  out.reserve(rotation_width(layout) + 4);
  if (layout == RotationLayout::SixD) {
    const auto r = rot_to_6d(p.rotation);
    out.assign(r.begin(), r.end());
  } else {
    const auto r = rot_to_9d(p.rotation);
    out.assign(r.begin(), r.end());
  }
  out.push_back(p.translation.x());
  out.push_back(p.translation.y());
  out.push_back(p.translation.z());
  out.push_back(p.scale);
  return out;
}

Sim3Pose pose_from_params(std::span<const double> params, RotationLayout layout) {
  const std::size_t w = rotation_width(layout);
  if (params.size() != w + 4) {
    throw Error(ErrorKind::LayoutMismatch, "pose vector length does not match rotation layout");
  }
  Rotation r;
  if (layout == RotationLayout::SixD) {
    Rotation6D r6;
    std::copy_n(params.begin(), 6, r6.begin());
    r = rot_from_6d(r6);
  } else {
    Rotation9D r9;
    std::copy_n(params.begin(), 9, r9.begin());
    r = rot_from_9d(r9);
  }
  return Sim3Pose(r, Eigen::Vector3d(params[w], params[w + 1], params[w + 2]), params[w + 3]);
}

std::vector<double> pose_normalize(std::span<const double> params, const PoseStats& stats) {
  check_layout(params.size(), stats);
  std::vector<double> out(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    out[i] = (params[i] - stats.mean[i]) / stats.stddev[i];
  }
  return out;
}

std::vector<double> pose_denormalize(std::span<const double> normalized, const PoseStats& stats) {
  check_layout(normalized.size(), stats);
  std::vector<double> out(normalized.size());
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    out[i] = normalized[i] * stats.stddev[i] + stats.mean[i];
  }
  return out;
}

PoseStats pose_stats_fit(std::span<const std::vector<double>> samples, RotationLayout layout) {
  PoseStats stats;
  stats.layout = layout;
  const std::size_t w = stats.width();
  if (samples.size() < 2) {
    throw Error(ErrorKind::DegenerateStats, "at least two pose samples are required");
  }
  stats.mean.assign(w, 0.0);
  stats.stddev.assign(w, 0.0);
  for (const auto& s : samples) {
    if (s.size() != w) {
      throw Error(ErrorKind::LayoutMismatch, "pose sample length does not match rotation layout");
    }
    for (std::size_t i = 0; i < w; ++i) stats.mean[i] += s[i];
  }
  const auto n = static_cast<double>(samples.size());
  for (auto& m : stats.mean) m /= n;
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < w; ++i) {
      const double d = s[i] - stats.mean[i];
      stats.stddev[i] += d * d;
    }
  }
  for (std::size_t i = 0; i < w; ++i) {
    stats.stddev[i] = std::sqrt(stats.stddev[i] / n);
    if (!(stats.stddev[i] > 0.0)) {
      throw Error(ErrorKind::DegenerateStats,
                  "component " + component_name(i, rotation_width(layout)) + " is constant");
    }
  }
  return stats;
}

void write_pose_stats(std::ostream& os, const PoseStats& stats) {
  const std::size_t w = rotation_width(stats.layout);
  os << "layout " << w << "d\n";
  char buf[96];
  for (std::size_t i = 0; i < stats.width(); ++i) {
    std::snprintf(buf, sizeof(buf), " %.17g %.17g\n", stats.mean[i], stats.stddev[i]);
    os << component_name(i, w) << buf;
  }
}

PoseStats read_pose_stats(std::istream& is) {
  PoseStats stats;
  bool have_layout = false;
  std::vector<bool> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "layout") {
      std::string value;
      ls >> value;
      if (value == "6d") {
        stats.layout = RotationLayout::SixD;
      } else if (value == "9d") {
        stats.layout = RotationLayout::NineD;
      } else {
        throw Error(ErrorKind::MalformedRecord, "unknown rotation layout '" + value + "'");
      }
      have_layout = true;
      stats.mean.assign(stats.width(), 0.0);
      stats.stddev.assign(stats.width(), 0.0);
      seen.assign(stats.width(), false);
      continue;
    }
    if (!have_layout) {
      throw Error(ErrorKind::MalformedRecord, "pose statistics must start with a layout line");
    }
    std::size_t idx = stats.width();
    for (std::size_t i = 0; i < stats.width(); ++i) {
      if (component_name(i, rotation_width(stats.layout)) == key) idx = i;
    }
    double m = 0.0, s = 0.0;
    if (idx == stats.width() || !(ls >> m >> s)) {
      throw Error(ErrorKind::MalformedRecord,
                  "bad pose statistics line " + std::to_string(line_no) + ": " + line);
    }
    if (!(s > 0.0)) {
      throw Error(ErrorKind::DegenerateStats, "non-positive standard deviation for " + key);
    }
    stats.mean[idx] = m;
    stats.stddev[idx] = s;
    seen[idx] = true;
  }
  if (!have_layout) {
    throw Error(ErrorKind::MalformedRecord, "pose statistics are empty");
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw Error(ErrorKind::MalformedRecord,
                  "missing component " + component_name(i, rotation_width(stats.layout)));
    }
  }
  return stats;
}

PoseStats load_pose_stats(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingFile, path);
  return read_pose_stats(in);
}

}  // namespace shapepose
