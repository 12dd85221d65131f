#include "shapepose/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "shapepose/errors.hpp"
#include "shapepose/image_io.hpp"

namespace shapepose {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string pad6(int v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d", v);
  return buf;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingFile, path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedRecord, path.string() + ": " + e.what());
  }
}

template <std::size_t N>
std::array<double, N> numbers(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) {
    throw Error(ErrorKind::MalformedRecord, where + ": missing key '" + key + "'");
  }
  const json& arr = obj.at(key);
  if (!arr.is_array() || arr.size() != N) {
    throw Error(ErrorKind::MalformedRecord,
                where + ": key '" + key + "' must hold " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!arr[i].is_number()) {
      throw Error(ErrorKind::MalformedRecord, where + ": key '" + key + "' has a non-number");
    }
    out[i] = arr[i].get<double>();
  }
  return out;
}

Eigen::Matrix3d row_major(const std::array<double, 9>& r) {
  Eigen::Matrix3d m;
  m << r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7], r[8];
  return m;
}

// Accepts proper rotations up to the rounding typical of text records.
Rotation checked_rotation(const Eigen::Matrix3d& m, const std::string& where) {
  if (!m.allFinite()) throw Error(ErrorKind::MalformedRecord, where + ": non-finite rotation");
  if (m.determinant() <= 0.0) {
    throw Error(ErrorKind::MalformedRecord, where + ": rotation matrix is a reflection");
  }
  if ((m.transpose() * m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-4) {
    throw Error(ErrorKind::MalformedRecord, where + ": rotation matrix is not orthonormal");
  }
  return rot_from_9d({m(0, 0), m(0, 1), m(0, 2), m(1, 0), m(1, 1), m(1, 2), m(2, 0), m(2, 1),
                      m(2, 2)});
}

int int_field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_number_integer()) {
    throw Error(ErrorKind::MalformedRecord, where + ": missing integer key '" + key + "'");
  }
  return obj.at(key).get<int>();
}

}  // namespace

fs::path bop_scene_dir(const fs::path& root, int scene_id, const std::string& split) {
  return root / split / pad6(scene_id);
}

std::vector<int> list_bop_scenes(const fs::path& root, const std::string& split) {
  const fs::path dir = root / split;
  if (!fs::is_directory(dir)) throw Error(ErrorKind::MissingFile, dir.string());
  std::vector<int> ids;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    if (name.empty() || !std::all_of(name.begin(), name.end(), ::isdigit)) continue;
    ids.push_back(std::stoi(name));
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<SceneFrame> load_bop_scene(const fs::path& root, int scene_id,
                                       const BopOptions& options) {
  const fs::path dir = bop_scene_dir(root, scene_id, options.split);
  const fs::path camera_path = dir / "scene_camera.json";
  const fs::path gt_path = dir / "scene_gt.json";
  const json cameras = read_json(camera_path);
  const json gts = read_json(gt_path);

  std::vector<int> frame_ids;
  for (const auto& [key, _] : cameras.items()) {
    const int id = std::stoi(key);
    if (options.frames.empty() || options.frames.count(id)) frame_ids.push_back(id);
  }
  std::sort(frame_ids.begin(), frame_ids.end());

  std::vector<SceneFrame> frames;
  for (int fid : frame_ids) {
    const std::string key = std::to_string(fid);
    const std::string cam_where = camera_path.string() + " [" + key + "]";
    const json& cam = cameras.at(key);
    SceneFrame f;
    f.scene_id = scene_id;
    f.frame_id = fid;

    const auto k = numbers<9>(cam, "cam_K", cam_where);
    f.intrinsics.fx = k[0];
    f.intrinsics.cx = k[2];
    f.intrinsics.fy = k[4];
    f.intrinsics.cy = k[5];
    if (!cam.contains("depth_scale") || !cam.at("depth_scale").is_number()) {
      throw Error(ErrorKind::UnitMismatch, cam_where + ": depth_scale is missing");
    }
    f.depth_scale = cam.at("depth_scale").get<double>();
    if (options.depth_scale_in_mm) f.depth_scale *= 0.001;
    if (!(f.depth_scale > 0.0)) {
      throw Error(ErrorKind::UnitMismatch, cam_where + ": depth_scale must be positive");
    }
    if (cam.contains("cam_R_w2c") && cam.contains("cam_t_w2c")) {
      const auto r = numbers<9>(cam, "cam_R_w2c", cam_where);
      const auto t = numbers<3>(cam, "cam_t_w2c", cam_where);
      RigidTransform camera_from_world{checked_rotation(row_major(r), cam_where),
                                       Eigen::Vector3d(t[0], t[1], t[2]) * 0.001};
      f.world_from_camera = camera_from_world.inverse();
    }

    const Image16 raw = read_png_gray16((dir / "depth" / (pad6(fid) + ".png")).string());
    f.intrinsics.width = raw.width;
    f.intrinsics.height = raw.height;
    f.intrinsics.validate();
    f.depth = DepthImage(raw.width, raw.height);
    for (std::size_t i = 0; i < raw.pixels.size(); ++i) {
      if (raw.pixels[i] == 0) continue;
      f.depth.depth[i] = static_cast<double>(raw.pixels[i]) * f.depth_scale;
      f.depth.valid[i] = 1;
    }

    if (!gts.contains(key)) {
      throw Error(ErrorKind::MalformedRecord, gt_path.string() + ": no entry for frame " + key);
    }
    const json& list = gts.at(key);
    if (!list.is_array()) {
      throw Error(ErrorKind::MalformedRecord, gt_path.string() + " [" + key + "]: not a list");
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string where = gt_path.string() + " [" + key + "][" + std::to_string(i) + "]";
      GtInstance inst;
      inst.record.cam_R_m2c = numbers<9>(list[i], "cam_R_m2c", where);
      inst.record.cam_t_m2c = numbers<3>(list[i], "cam_t_m2c", where);
      inst.record.obj_id = int_field(list[i], "obj_id", where);
      inst.obj_id = inst.record.obj_id;
      const auto& t = inst.record.cam_t_m2c;
      inst.pose = Sim3Pose(checked_rotation(row_major(inst.record.cam_R_m2c), where),
                           Eigen::Vector3d(t[0], t[1], t[2]) * 0.001, 1.0);

      const std::string mask_name = pad6(fid) + "_" + pad6(static_cast<int>(i)) + ".png";
      inst.visible = read_png_mask((dir / "mask_visib" / mask_name).string());
      if (inst.visible.width != raw.width || inst.visible.height != raw.height) {
        throw Error(ErrorKind::MalformedRecord, mask_name + ": visible mask size differs from depth");
      }
      const fs::path amodal_path = dir / "mask" / mask_name;
      if (fs::exists(amodal_path)) {
        inst.amodal = read_png_mask(amodal_path.string());
        if (inst.amodal->width != raw.width || inst.amodal->height != raw.height) {
          throw Error(ErrorKind::MalformedRecord, mask_name + ": amodal mask size differs from depth");
        }
      }
      f.instances.push_back(std::move(inst));
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

TriMesh load_bop_model(const fs::path& root, int obj_id) {
  const fs::path path = root / "models" / ("obj_" + pad6(obj_id) + ".ply");
  if (!fs::exists(path)) throw Error(ErrorKind::MissingFile, path.string());
  TriMesh m = load_mesh(path.string());
  for (auto& v : m.vertices) v *= 0.001;
  return m;
}

std::string format_bop_pose_record(const BopPoseRecord& r) {
  json j;
  j["cam_R_m2c"] = r.cam_R_m2c;
  j["cam_t_m2c"] = r.cam_t_m2c;
  j["obj_id"] = r.obj_id;
  return j.dump();
}

BinaryMask erode_mask(const BinaryMask& m) {
  BinaryMask out(m.width, m.height);
  for (int v = 1; v + 1 < m.height; ++v) {
    for (int u = 1; u + 1 < m.width; ++u) {
      bool all = true;
      for (int dv = -1; dv <= 1 && all; ++dv) {
        for (int du = -1; du <= 1 && all; ++du) all = m.at(u + du, v + dv);
      }
      out.set(u, v, all);
    }
  }
  return out;
}

std::vector<FrameKey> read_frame_list(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingFile, path.string());
  std::vector<FrameKey> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    FrameKey k;
    if (!(ls >> k.scene_id)) continue;
    if (!(ls >> k.frame_id)) {
      throw Error(ErrorKind::MalformedRecord,
                  path.string() + ":" + std::to_string(line_no) + ": expected scene and frame id");
    }
    out.push_back(k);
  }
  return out;
}

PredictionBundle load_prediction_bundle(const fs::path& dir) {
  const fs::path poses_path = dir / "poses.json";
  const json doc = read_json(poses_path);
  const std::string where = poses_path.string();

  PredictionBundle b;
  b.id = dir.filename().string();
  b.scene_id = int_field(doc, "scene_id", where);
  b.frame_id = int_field(doc, "frame_id", where);
  b.gt_index = doc.contains("gt_index") ? int_field(doc, "gt_index", where) : 0;
  if (doc.contains("seed_id")) b.seed_id = int_field(doc, "seed_id", where);

  fs::path mesh_path;
  if (doc.contains("mesh")) {
    mesh_path = dir / doc.at("mesh").get<std::string>();
  } else if (fs::exists(dir / "mesh.ply")) {
    mesh_path = dir / "mesh.ply";
  } else if (fs::exists(dir / "mesh.obj")) {
    mesh_path = dir / "mesh.obj";
  } else {
    throw Error(ErrorKind::MissingFile, (dir / "mesh.ply").string());
  }
  b.mesh = load_mesh(mesh_path.string());
  if (b.mesh.triangles.empty()) {
    throw Error(ErrorKind::MalformedRecord, mesh_path.string() + ": mesh has no faces");
  }

  if (!doc.contains("poses") || !doc.at("poses").is_array() || doc.at("poses").empty()) {
    throw Error(ErrorKind::MalformedRecord, where + ": 'poses' must be a non-empty list");
  }
  const json& poses = doc.at("poses");
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const json& p = poses[i];
    const std::string pw = where + " poses[" + std::to_string(i) + "]";
    PredictedPose pp;
    pp.view_id = p.contains("view_id") ? int_field(p, "view_id", pw) : static_cast<int>(i);
    pp.frame_id = p.contains("frame_id") ? int_field(p, "frame_id", pw) : b.frame_id;
    pp.gt_index = p.contains("gt_index") ? int_field(p, "gt_index", pw) : b.gt_index;

    Rotation rot;
    if (p.contains("rotation_wxyz")) {
      const auto q = numbers<4>(p, "rotation_wxyz", pw);
      const double norm = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
      if (!(std::abs(norm - 1.0) < 1e-4)) {
        throw Error(ErrorKind::MalformedRecord, pw + ": quaternion is not unit length");
      }
      rot = Rotation(Eigen::Quaterniond(q[0], q[1], q[2], q[3]));
    } else if (p.contains("rotation_matrix")) {
      rot = checked_rotation(row_major(numbers<9>(p, "rotation_matrix", pw)), pw);
    } else {
      throw Error(ErrorKind::MalformedRecord, pw + ": needs rotation_wxyz or rotation_matrix");
    }
    const auto t = numbers<3>(p, "translation_m", pw);
    const double scale = p.contains("scale") ? p.at("scale").get<double>() : 1.0;
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw Error(ErrorKind::MalformedRecord, pw + ": scale must be positive");
    }
    pp.candidate.pose = Sim3Pose(rot, Eigen::Vector3d(t[0], t[1], t[2]), scale);
    if (p.contains("normalization")) {
      const json& n = p.at("normalization");
      const auto c = numbers<3>(n, "center_m", pw + " normalization");
      pp.candidate.normalization.center = Eigen::Vector3d(c[0], c[1], c[2]);
      if (!n.contains("scale_m") || !(n.at("scale_m").get<double>() > 0.0)) {
        throw Error(ErrorKind::MalformedRecord, pw + ": normalization scale_m must be positive");
      }
      pp.candidate.normalization.scale = n.at("scale_m").get<double>();
    }
    b.poses.push_back(pp);
  }
  std::stable_sort(b.poses.begin(), b.poses.end(),
                   [](const PredictedPose& a, const PredictedPose& c) { return a.view_id < c.view_id; });
  for (std::size_t i = 0; i < b.poses.size(); ++i) b.poses[i].candidate.view = static_cast<int>(i);
  return b;
}

std::vector<PredictionBundle> load_predictions(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error(ErrorKind::MissingFile, root.string());
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "poses.json")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<PredictionBundle> out;
  out.reserve(dirs.size());
  for (const auto& d : dirs) out.push_back(load_prediction_bundle(d));
  return out;
}

}  // namespace shapepose
