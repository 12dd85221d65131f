#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

#include <unistd.h>

#include <json.hpp>

#include "shapepose/image_io.hpp"
#include "shapepose/ingest.hpp"

namespace shapepose::testing {

using json = nlohmann::ordered_json;

Eigen::Vector3d random_unit_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    Eigen::Vector3d v(n(rng), n(rng), n(rng));
    if (v.norm() > 1e-6) return v.normalized();
  }
}

Rotation random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return Rotation(q);
}

Rotation random_rotation_by(std::mt19937_64& rng, double angle_rad) {
  return Rotation::from_axis_angle(random_unit_vector(rng), angle_rad);
}

PointList random_cloud(std::mt19937_64& rng, std::size_t n, double half_extent) {
  std::uniform_real_distribution<double> u(-half_extent, half_extent);
  PointList pts(n);
  for (auto& p : pts) p = Eigen::Vector3d(u(rng), u(rng), u(rng));
  return pts;
}

SparseFeatures random_sparse_features(std::mt19937_64& rng, int resolution, std::size_t count,
                                      int channels) {
  std::uniform_int_distribution<int> coord(0, resolution - 1);
  std::set<std::tuple<int, int, int>> picked;  // (z, y, x) sorts in raster order
  while (picked.size() < count) picked.emplace(coord(rng), coord(rng), coord(rng));
  SparseFeatures f;
  f.structure.resolution = resolution;
  f.channels = channels;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& [z, y, x] : picked) {
    f.structure.coords.push_back({static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y),
                                  static_cast<std::uint16_t>(z)});
    for (int c = 0; c < channels; ++c) f.features.push_back(u(rng));
  }
  return f;
}

OccupancyGrid random_grid(std::mt19937_64& rng, int resolution, double p) {
  std::bernoulli_distribution on(p);
  OccupancyGrid g(resolution);
  for (int z = 0; z < resolution; ++z) {
    for (int y = 0; y < resolution; ++y) {
      for (int x = 0; x < resolution; ++x) g.set(x, y, z, on(rng));
    }
  }
  return g;
}

double brute_nn_distance(const Eigen::Vector3d& q, std::span<const Eigen::Vector3d> pts) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) best = std::min(best, (p - q).squaredNorm());
  return std::sqrt(best);
}

double brute_add_s(std::span<const Eigen::Vector3d> a, std::span<const Eigen::Vector3d> b) {
  double sum = 0.0;
  for (const auto& p : a) sum += brute_nn_distance(p, b);
  return sum / static_cast<double>(a.size());
}

double brute_diameter(std::span<const Eigen::Vector3d> pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      best = std::max(best, (pts[i] - pts[j]).squaredNorm());
    }
  }
  return std::sqrt(best);
}

double sorted_percentile(std::vector<double> values, double alpha) {
  std::sort(values.begin(), values.end());
  const double pos = alpha * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

Eigen::Matrix3d grid_search_nearest_rotation(const Eigen::Matrix3d& m) {
  Eigen::Vector3d c0 = m.col(0).normalized();
  Eigen::Vector3d c1 = (m.col(1) - c0.dot(m.col(1)) * c0).normalized();
  Eigen::Matrix3d best;
  best << c0, c1, c0.cross(c1);
  double best_cost = (best - m).squaredNorm();
  for (double step = 0.05; step > 1e-6; step /= 3.0) {
    bool improved = true;
    while (improved) {
      improved = false;
      const Eigen::Matrix3d center = best;
      for (int i = -3; i <= 3; ++i) {
        for (int j = -3; j <= 3; ++j) {
          for (int k = -3; k <= 3; ++k) {
            const Eigen::Vector3d w(i * step, j * step, k * step);
            const double angle = w.norm();
            if (angle == 0.0) continue;
            const Eigen::Matrix3d cand =
                Eigen::AngleAxisd(angle, w / angle).toRotationMatrix() * center;
            const double cost = (cand - m).squaredNorm();
            if (cost < best_cost - 1e-15) {
              best_cost = cost;
              best = cand;
              improved = true;
            }
          }
        }
      }
    }
  }
  return best;
}

double sorted_trimmed_mean(std::vector<double> values, double trim) {
  std::sort(values.begin(), values.end());
  // Exact rational rounding: drop = ceil(trim·K) with trim given to ~1e-12.
  const double raw = trim * static_cast<double>(values.size());
  auto drop = static_cast<std::size_t>(std::llround(raw));
  if (std::abs(raw - static_cast<double>(drop)) > 1e-9 && static_cast<double>(drop) < raw) ++drop;
  double sum = 0.0;
  const std::size_t kept = values.size() - drop;
  for (std::size_t i = 0; i < kept; ++i) sum += values[i];
  return sum / static_cast<double>(kept);
}

Pointmap pointmap_from_points(const PointList& pts) {
  Pointmap p(static_cast<int>(pts.size()), 1);
  p.points = pts;
  std::fill(p.valid.begin(), p.valid.end(), 1);
  return p;
}

CameraIntrinsics test_camera(int width, int height, double focal) {
  CameraIntrinsics k;
  k.fx = focal;
  k.fy = focal;
  k.cx = width / 2.0;
  k.cy = height / 2.0;
  k.width = width;
  k.height = height;
  return k;
}

namespace {

// Möller–Trumbore intersection of the ray origin + t·dir; returns t or +inf.
double ray_triangle(const Eigen::Vector3d& dir, const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                    const Eigen::Vector3d& c) {
  const Eigen::Vector3d e1 = b - a, e2 = c - a;
  const Eigen::Vector3d p = dir.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-15) return std::numeric_limits<double>::infinity();
  const double inv = 1.0 / det;
  const Eigen::Vector3d s = -a;
  const double u = s.dot(p) * inv;
  if (u < 0.0 || u > 1.0) return std::numeric_limits<double>::infinity();
  const Eigen::Vector3d q = s.cross(e1);
  const double v = dir.dot(q) * inv;
  if (v < 0.0 || u + v > 1.0) return std::numeric_limits<double>::infinity();
  const double t = e2.dot(q) * inv;
  return t > 0.0 ? t : std::numeric_limits<double>::infinity();
}

}  // namespace

Rendering render(const CameraIntrinsics& k, std::span<const PosedMesh> objects) {
  const int w = k.width, h = k.height;
  const std::size_t npx = static_cast<std::size_t>(w) * h;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> zbuf(objects.size(), std::vector<double>(npx, inf));

  for (std::size_t o = 0; o < objects.size(); ++o) {
    const TriMesh cam = transformed(*objects[o].mesh, objects[o].camera_from_object);
    for (const auto& tri : cam.triangles) {
      const Eigen::Vector3d& a = cam.vertices[tri[0]];
      const Eigen::Vector3d& b = cam.vertices[tri[1]];
      const Eigen::Vector3d& c = cam.vertices[tri[2]];
      if (a.z() <= 0.0 || b.z() <= 0.0 || c.z() <= 0.0) continue;
      double umin = inf, umax = -inf, vmin = inf, vmax = -inf;
      for (const auto* p : {&a, &b, &c}) {
        const double u = k.fx * p->x() / p->z() + k.cx;
        const double v = k.fy * p->y() / p->z() + k.cy;
        umin = std::min(umin, u);
        umax = std::max(umax, u);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
      }
      const int u0 = std::max(0, static_cast<int>(std::floor(umin)));
      const int u1 = std::min(w - 1, static_cast<int>(std::ceil(umax)));
      const int v0 = std::max(0, static_cast<int>(std::floor(vmin)));
      const int v1 = std::min(h - 1, static_cast<int>(std::ceil(vmax)));
      for (int v = v0; v <= v1; ++v) {
        for (int u = u0; u <= u1; ++u) {
          const Eigen::Vector3d dir((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
          const double t = ray_triangle(dir, a, b, c);
          double& z = zbuf[o][static_cast<std::size_t>(v) * w + u];
          if (t < z) z = t;  // dir.z == 1, so t is the depth
        }
      }
    }
  }

  Rendering r;
  r.depth = DepthImage(w, h);
  r.visible.assign(objects.size(), BinaryMask(w, h));
  r.amodal.assign(objects.size(), BinaryMask(w, h));
  for (std::size_t i = 0; i < npx; ++i) {
    double best = inf;
    std::size_t owner = objects.size();
    for (std::size_t o = 0; o < objects.size(); ++o) {
      if (zbuf[o][i] < inf) r.amodal[o].data[i] = 1;
      if (zbuf[o][i] < best) {
        best = zbuf[o][i];
        owner = o;
      }
    }
    if (owner < objects.size()) {
      r.visible[owner].data[i] = 1;
      r.depth.depth[i] = best;
      r.depth.valid[i] = 1;
    }
  }
  return r;
}

Pointmap rendered_pointmap(const CameraIntrinsics& k, const Rendering& r, std::size_t index) {
  return mask_pointmap(backproject(r.depth, k), erode_mask(r.visible[index]));
}

TriMesh make_plate(double width, double height, double thickness) {
  return make_box(Eigen::Vector3d(width, height, thickness));
}

SelectionScene make_selection_scene(std::mt19937_64& rng, int views) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SelectionScene s;
  s.mesh = make_box(Eigen::Vector3d(0.12, 0.08, 0.05));
  s.camera = test_camera(160, 120, 200.0);
  const Sim3Pose world_from_object(random_rotation(rng),
                                   Eigen::Vector3d(0.02 * u(rng), 0.02 * u(rng), 0.6), 1.0);
  for (int v = 0; v < views; ++v) {
    RigidTransform w;
    if (v > 0) {
      // Orbit the object by up to ~25 degrees.
      const Eigen::Vector3d axis = Eigen::Vector3d(0.2 * u(rng), 1.0, 0.2 * u(rng)).normalized();
      w.rotation = Rotation::from_axis_angle(axis, (0.25 + 0.15 * u(rng)) * (v % 2 ? 1.0 : -1.0));
      w.translation = world_from_object.translation - w.rotation * Eigen::Vector3d(0, 0, 0.6);
    }
    const Sim3Pose camera_from_object = sim3_compose(sim3_inverse(w.as_sim3()), world_from_object);
    const PosedMesh posed{&s.mesh, camera_from_object};
    const Rendering r = render(s.camera, std::span<const PosedMesh>(&posed, 1));
    s.world_from_camera.push_back(w);
    s.camera_from_object.push_back(camera_from_object);
    s.pointmaps.push_back(rendered_pointmap(s.camera, r, 0));
  }
  return s;
}

PoseCandidate make_candidate(const SelectionScene& s, int view, const Sim3Pose& camera_from_object) {
  PoseCandidate c;
  c.view = view;
  c.normalization = robust_normalization(s.pointmaps[view]);
  c.pose = sim3_compose(sim3_inverse(c.normalization.to_metric()), camera_from_object);
  return c;
}

Sim3Pose perturb_pose(std::mt19937_64& rng, const Sim3Pose& p, double angle_rad, double distance) {
  Sim3Pose out = p;
  out.rotation = p.rotation * random_rotation_by(rng, angle_rad);
  out.translation += distance * random_unit_vector(rng);
  return out;
}

namespace {

std::string pad6(int v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06d", v);
  return buf;
}

json matrix_row_major(const Eigen::Matrix3d& m) {
  json a = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
  }
  return a;
}

json vec(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

void write_json(const fs::path& p, const json& j) {
  std::ofstream out(p);
  out << j.dump(1) << "\n";
}

}  // namespace

void write_bop_dataset(const fs::path& root, const FixtureDataset& d) {
  fs::create_directories(root / "models");
  for (const auto& [id, mesh] : d.models) {
    TriMesh mm = mesh;
    for (auto& v : mm.vertices) v *= 1000.0;
    save_ply((root / "models" / ("obj_" + pad6(id) + ".ply")).string(), mm);
  }
  for (const auto& scene : d.scenes) {
    const fs::path dir = root / d.split / pad6(scene.scene_id);
    fs::create_directories(dir / "depth");
    fs::create_directories(dir / "mask_visib");
    if (d.write_amodal) fs::create_directories(dir / "mask");
    json cameras = json::object();
    json gts = json::object();
    for (const auto& frame : scene.frames) {
      const std::string key = std::to_string(frame.frame_id);
      json cam;
      cam["cam_K"] = {d.camera.fx, 0.0, d.camera.cx, 0.0, d.camera.fy, d.camera.cy, 0.0, 0.0, 1.0};
      cam["depth_scale"] = d.depth_scale;
      if (frame.world_from_camera) {
        const RigidTransform c = frame.world_from_camera->inverse();
        cam["cam_R_w2c"] = matrix_row_major(c.rotation.matrix());
        cam["cam_t_w2c"] = vec(c.translation * 1000.0);
      }
      cameras[key] = cam;

      std::vector<PosedMesh> posed;
      json list = json::array();
      for (const auto& inst : frame.instances) {
        posed.push_back({&d.models.at(inst.obj_id), inst.pose});
        json g;
        g["cam_R_m2c"] = matrix_row_major(inst.pose.rotation.matrix());
        g["cam_t_m2c"] = vec(inst.pose.translation * 1000.0);
        g["obj_id"] = inst.obj_id;
        list.push_back(g);
      }
      gts[key] = list;

      const Rendering r = render(d.camera, posed);
      Image16 depth{d.camera.width, d.camera.height, {}};
      depth.pixels.resize(r.depth.depth.size(), 0);
      for (std::size_t i = 0; i < depth.pixels.size(); ++i) {
        if (r.depth.valid[i]) {
          depth.pixels[i] = static_cast<std::uint16_t>(std::lround(r.depth.depth[i] / d.depth_scale));
        }
      }
      write_png_gray16((dir / "depth" / (pad6(frame.frame_id) + ".png")).string(), depth);
      for (std::size_t i = 0; i < frame.instances.size(); ++i) {
        const std::string name = pad6(frame.frame_id) + "_" + pad6(static_cast<int>(i)) + ".png";
        write_png_mask((dir / "mask_visib" / name).string(), r.visible[i]);
        if (d.write_amodal) write_png_mask((dir / "mask" / name).string(), r.amodal[i]);
      }
    }
    write_json(dir / "scene_camera.json", cameras);
    write_json(dir / "scene_gt.json", gts);
  }
}

void write_prediction_bundle(const fs::path& pred_root, const FixtureBundle& b) {
  const fs::path dir = pred_root / b.id;
  fs::create_directories(dir);
  save_ply((dir / "mesh.ply").string(), b.mesh);
  json doc;
  doc["scene_id"] = b.scene_id;
  doc["frame_id"] = b.frame_id;
  doc["gt_index"] = b.gt_index;
  if (b.seed_id) doc["seed_id"] = *b.seed_id;
  json poses = json::array();
  for (const auto& p : b.poses) {
    Sim3Pose stored = p.camera_from_object;
    json e;
    e["view_id"] = p.view_id;
    e["frame_id"] = p.frame_id;
    e["gt_index"] = p.gt_index;
    if (p.normalization) {
      stored = sim3_compose(sim3_inverse(p.normalization->to_metric()), p.camera_from_object);
      e["normalization"] = {{"center_m", vec(p.normalization->center)},
                            {"scale_m", p.normalization->scale}};
    }
    const auto& q = stored.rotation.quaternion();
    e["rotation_wxyz"] = {q.w(), q.x(), q.y(), q.z()};
    e["translation_m"] = vec(stored.translation);
    e["scale"] = stored.scale;
    poses.push_back(e);
  }
  doc["poses"] = poses;
  write_json(dir / "poses.json", doc);
}

FixtureDataset plate_dataset() {
  FixtureDataset d;
  d.models[1] = make_plate(0.10, 0.08);
  d.models[2] = make_plate(0.12, 0.06);
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int s = 0; s < 3; ++s) {
    FixtureScene scene;
    scene.scene_id = s + 1;
    // Object poses in the world frame, which coincides with the first camera.
    const Sim3Pose back(Rotation::from_axis_angle(random_unit_vector(rng), 0.3) *
                            Rotation::from_axis_angle(Eigen::Vector3d::UnitZ(), 3.0 * u(rng)),
                        Eigen::Vector3d(0.02 * u(rng), 0.02 * u(rng), 0.62), 1.0);
    // The front plate covers a growing part of the back plate across scenes.
    const double shift = 0.085 - 0.025 * s;
    const Sim3Pose front(Rotation::from_axis_angle(random_unit_vector(rng), 0.25),
                         back.translation + Eigen::Vector3d(shift, 0.015 * u(rng), -0.08), 1.0);
    for (int f = 0; f < 2; ++f) {
      FixtureFrame frame;
      frame.frame_id = f;
      RigidTransform world_from_camera;
      if (f == 1) {
        // Second camera orbits the objects by ~10 degrees.
        world_from_camera.rotation = Rotation::from_axis_angle(Eigen::Vector3d(0.1, 1.0, 0.05), 0.17);
        world_from_camera.translation =
            back.translation - (world_from_camera.rotation * Eigen::Vector3d(0, 0, 0.62)) +
            Eigen::Vector3d(0.0, 0.005, 0.0);
      }
      frame.world_from_camera = world_from_camera;
      const Sim3Pose camera_from_world = sim3_inverse(world_from_camera.as_sim3());
      frame.instances.push_back({1, sim3_compose(camera_from_world, back)});
      frame.instances.push_back({2, sim3_compose(camera_from_world, front)});
      scene.frames.push_back(frame);
    }
    d.scenes.push_back(scene);
  }
  return d;
}

double model_diameter(const TriMesh& m) { return brute_diameter(m.vertices); }

void write_gt_predictions(const fs::path& pred_root, const FixtureDataset& d,
                          double offset_fraction) {
  for (const auto& scene : d.scenes) {
    for (const auto& frame : scene.frames) {
      for (std::size_t i = 0; i < frame.instances.size(); ++i) {
        const auto& inst = frame.instances[i];
        const TriMesh& model = d.models.at(inst.obj_id);
        Sim3Pose pose = inst.pose;
        pose.translation += offset_fraction * model_diameter(model) *
                            (inst.pose.rotation * Eigen::Vector3d::UnitZ());
        FixtureBundle b;
        b.id = "s" + std::to_string(scene.scene_id) + "_f" + std::to_string(frame.frame_id) +
               "_i" + std::to_string(i);
        b.scene_id = scene.scene_id;
        b.frame_id = frame.frame_id;
        b.gt_index = static_cast<int>(i);
        b.mesh = model;
        ObjectNormalization norm;
        norm.center = inst.pose.translation + Eigen::Vector3d(0.003, -0.002, 0.001);
        norm.scale = 0.15;
        b.poses.push_back({0, frame.frame_id, static_cast<int>(i), pose, norm});
        write_prediction_bundle(pred_root, b);
      }
    }
  }
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p =
      fs::temp_directory_path() / ("shapepose_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

EvalReport golden_eval_report() {
  EvalReport r;
  r.dataset = "golden";
  auto row = [](int scene, int frame, int gt, int obj, double add, double diam, double pred_diam,
                double cd, std::optional<double> occ) {
    EvalRow e;
    e.scene_id = scene;
    e.frame_id = frame;
    e.gt_index = gt;
    e.obj_id = obj;
    e.prediction_id = "p" + std::to_string(scene) + std::to_string(frame) + std::to_string(gt);
    e.ok = true;
    e.add_sb = add;
    e.gt_diameter = diam;
    e.pred_diameter = pred_diam;
    e.recall_hits = {add < 0.10 * diam, add < 0.05 * diam};
    e.dre = dre(pred_diam, diam);
    e.dre_hit = e.dre < 0.05;
    e.cd_norm = cd;
    e.occlusion = occ;
    if (occ) e.occlusion_bin = occlusion_bin(*occ);
    e.selection_score = add * 0.5;
    return e;
  };
  r.rows.push_back(row(1, 0, 0, 1, 0.004, 0.128, 0.13, 0.01, 0.0));
  r.rows.push_back(row(1, 0, 1, 2, 0.009, 0.134, 0.12, 0.03, 0.25));
  r.rows.push_back(row(1, 1, 0, 1, 0.0125, 0.128, 0.128, 0.02, 0.1));
  r.rows.push_back(row(2, 0, 0, 1, 0.002, 0.128, 0.127, 0.005, 0.85));
  r.rows.push_back(row(2, 0, 1, 2, 0.02, 0.134, 0.15, 0.08, std::nullopt));
  EvalRow err;
  err.scene_id = 3;
  err.frame_id = 0;
  err.gt_index = 0;
  err.obj_id = 2;
  err.error = "MissingFile: no prediction bundle for this instance";
  r.rows.push_back(err);
  r.aggregates = aggregate_eval(r);
  r.occlusion_out_of_range = count_out_of_range(r);
  return r;
}

SelectionReport golden_selection_report() {
  SelectionReport r;
  r.mode = "single_view";
  r.oracle_criterion = "chamfer";
  SelectionRow a;
  a.scene_id = 1;
  a.obj_id = 1;
  a.ok = true;
  a.candidates = 2;
  a.selected = 1;
  a.oracle = 1;
  a.scores = {0.004, 0.0005};
  a.first_add_sb = 0.02;
  a.first_cd_norm = 0.05;
  a.selected_add_sb = a.oracle_add_sb = 0.001;
  a.selected_cd_norm = a.oracle_cd_norm = 0.004;
  a.worst_add_sb = 0.02;
  a.worst_cd_norm = 0.05;
  SelectionRow b = a;
  b.frame_id = 1;
  b.selected = 0;
  b.scores = {0.001, 0.003};
  b.first_add_sb = b.selected_add_sb = 0.003;
  b.first_cd_norm = b.selected_cd_norm = 0.006;
  b.worst_add_sb = 0.003;
  b.worst_cd_norm = 0.007;
  b.oracle_cd_norm = 0.006;
  b.oracle_add_sb = 0.003;
  b.oracle = 0;
  r.rows = {a, b};
  r.count = 2;
  r.aggregates = aggregate_selection(r);
  return r;
}

OcclusionReport golden_occlusion_report() {
  OcclusionReport r;
  auto row = [&](int gt, std::size_t vis, std::size_t amodal) {
    OcclusionRow o;
    o.scene_id = 1;
    o.gt_index = gt;
    o.obj_id = gt + 1;
    o.visible_pixels = vis;
    o.amodal_pixels = amodal;
    if (amodal == 0) {
      o.note = "no amodal mask";
      ++r.unavailable;
    } else {
      o.fraction = 1.0 - static_cast<double>(vis) / static_cast<double>(amodal);
      o.bin = occlusion_bin(*o.fraction);
      ++r.bin_counts[static_cast<int>(*o.bin)];
    }
    r.rows.push_back(o);
  };
  row(0, 100, 100);
  row(1, 70, 100);
  row(2, 10, 100);
  row(3, 40, 0);
  return r;
}

}  // namespace shapepose::testing
