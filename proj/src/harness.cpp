#include "shapepose/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "shapepose/errors.hpp"

namespace shapepose {

namespace fs = std::filesystem;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct InstanceKey {
  int scene_id = 0;
  int frame_id = 0;
  int gt_index = 0;
  auto operator<=>(const InstanceKey&) const = default;
};

struct Dataset {
  std::vector<FrameKey> requested;
  std::map<FrameKey, SceneFrame> frames;
  std::map<FrameKey, std::string> frame_errors;
  std::map<int, TriMesh> models;
  std::map<int, std::string> model_errors;
};

Dataset load_dataset(const RunConfig& cfg, bool whole_scenes) {
  Dataset d;
  if (!cfg.frames_file.empty()) {
    try {
      d.requested = read_frame_list(cfg.frames_file);
    } catch (const Error& e) {
      throw Error(ErrorKind::InvalidConfig, std::string("frame list: ") + e.what());
    }
  } else {
    std::vector<int> scenes;
    try {
      scenes = list_bop_scenes(cfg.dataset_root, cfg.split);
    } catch (const Error& e) {
      throw Error(ErrorKind::InvalidConfig, std::string("dataset root: ") + e.what());
    }
    for (int s : scenes) {
      try {
        BopOptions opt;
        opt.split = cfg.split;
        opt.depth_scale_in_mm = cfg.depth_scale_in_mm;
        for (auto& f : load_bop_scene(cfg.dataset_root, s, opt)) {
          const FrameKey k{s, f.frame_id};
          d.requested.push_back(k);
          d.frames.emplace(k, std::move(f));
        }
      } catch (const Error& e) {
        d.requested.push_back({s, -1});
        d.frame_errors[{s, -1}] = e.what();
      }
    }
  }
  if (d.requested.empty()) throw Error(ErrorKind::InvalidConfig, "no frames to evaluate");

  std::map<int, std::set<int>> wanted;
  for (const auto& k : d.requested) {
    if (!d.frames.count(k) && !d.frame_errors.count(k)) wanted[k.scene_id].insert(k.frame_id);
  }
  for (const auto& [scene, ids] : wanted) {
    BopOptions opt;
    opt.split = cfg.split;
    opt.depth_scale_in_mm = cfg.depth_scale_in_mm;
    if (!whole_scenes) opt.frames = ids;
    try {
      for (auto& f : load_bop_scene(cfg.dataset_root, scene, opt)) {
        d.frames.emplace(FrameKey{scene, f.frame_id}, std::move(f));
      }
    } catch (const Error& e) {
      for (int id : ids) d.frame_errors[{scene, id}] = e.what();
    }
  }
  for (const auto& k : d.requested) {
    if (!d.frames.count(k) && !d.frame_errors.count(k)) {
      d.frame_errors[k] = "frame " + std::to_string(k.frame_id) + " not found in scene " +
                          std::to_string(k.scene_id);
    }
  }
  std::sort(d.requested.begin(), d.requested.end());
  d.requested.erase(std::unique(d.requested.begin(), d.requested.end()), d.requested.end());
  return d;
}

void load_models(const RunConfig& cfg, Dataset& d) {
  std::set<int> ids;
  for (const auto& [k, f] : d.frames) {
    for (const auto& inst : f.instances) ids.insert(inst.obj_id);
  }
  for (int id : ids) {
    try {
      d.models.emplace(id, load_bop_model(cfg.dataset_root, id));
    } catch (const Error& e) {
      d.model_errors[id] = e.what();
    }
  }
}

struct Predictions {
  /// Samples of one instance ordered by (seed_id, bundle id).
  std::map<InstanceKey, std::vector<PredictionBundle>> by_instance;
  std::vector<std::pair<std::string, std::string>> errors;
};

Predictions load_prediction_set(const RunConfig& cfg) {
  if (!fs::is_directory(cfg.pred_root)) {
    throw Error(ErrorKind::InvalidConfig, "prediction root " + cfg.pred_root.string() +
                                              " is not a directory");
  }
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(cfg.pred_root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "poses.json")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  Predictions p;
  for (const auto& dir : dirs) {
    try {
      PredictionBundle b = load_prediction_bundle(dir);
      p.by_instance[{b.scene_id, b.frame_id, b.gt_index}].push_back(std::move(b));
    } catch (const Error& e) {
      p.errors.emplace_back(dir.filename().string(), e.what());
    }
  }
  for (auto& [key, list] : p.by_instance) {
    std::stable_sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
      const int sa = a.seed_id.value_or(-1), sb = b.seed_id.value_or(-1);
      return sa != sb ? sa < sb : a.id < b.id;
    });
  }
  return p;
}

const SceneFrame& frame_or_throw(const Dataset& d, int scene, int frame) {
  const auto it = d.frames.find({scene, frame});
  if (it == d.frames.end()) {
    throw Error(ErrorKind::MissingFile,
                "frame " + std::to_string(frame) + " of scene " + std::to_string(scene) +
                    " is not loaded");
  }
  return it->second;
}

const GtInstance& instance_or_throw(const SceneFrame& f, int gt_index) {
  if (gt_index < 0 || static_cast<std::size_t>(gt_index) >= f.instances.size()) {
    throw Error(ErrorKind::MalformedRecord, "GT index " + std::to_string(gt_index) +
                                                " out of range in frame " +
                                                std::to_string(f.frame_id));
  }
  return f.instances[gt_index];
}

const TriMesh& model_or_throw(const Dataset& d, int obj_id) {
  const auto it = d.models.find(obj_id);
  if (it != d.models.end()) return it->second;
  const auto err = d.model_errors.find(obj_id);
  throw Error(ErrorKind::MissingFile,
              err != d.model_errors.end() ? err->second : "model " + std::to_string(obj_id));
}

// Flattened (frame, GT instance) work items in deterministic order.
std::vector<InstanceKey> instance_keys(const Dataset& d) {
  std::vector<InstanceKey> keys;
  for (const auto& k : d.requested) {
    const auto it = d.frames.find(k);
    if (it == d.frames.end()) {
      keys.push_back({k.scene_id, k.frame_id, -1});
      continue;
    }
    for (std::size_t i = 0; i < it->second.instances.size(); ++i) {
      keys.push_back({k.scene_id, k.frame_id, static_cast<int>(i)});
    }
  }
  return keys;
}

std::string frame_error(const Dataset& d, const InstanceKey& k) {
  const auto it = d.frame_errors.find({k.scene_id, k.frame_id});
  return it != d.frame_errors.end() ? it->second : "frame unavailable";
}

}  // namespace

void RunConfig::validate() const {
  if (dataset_root.empty()) throw Error(ErrorKind::InvalidConfig, "dataset root is required");
  if (samples < 1) throw Error(ErrorKind::InvalidConfig, "sample count must be positive");
  if (workers < 1) throw Error(ErrorKind::InvalidConfig, "worker count must be at least 1");
  for (double t : thresholds) {
    if (!(t > 0.0 && t < 1.0)) throw Error(ErrorKind::InvalidConfig, "thresholds must lie in (0, 1)");
  }
  if (!(dre_threshold > 0.0 && dre_threshold < 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "DRE threshold must lie in (0, 1)");
  }
  if (!(trim >= 0.0 && trim < 0.5)) throw Error(ErrorKind::InvalidConfig, "trim must lie in [0, 0.5)");
  if (icp.max_iters < 0 || !(icp.tol >= 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "ICP iterations and tolerance must be non-negative");
  }
  if (outlier_cap && !(*outlier_cap > 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "outlier cap must be positive");
  }
}

std::uint64_t instance_seed(std::uint64_t global_seed, int scene_id, int frame_id, int gt_index) {
  std::uint64_t h = splitmix64(global_seed);
  h = splitmix64(h ^ static_cast<std::uint32_t>(scene_id));
  h = splitmix64(h ^ static_cast<std::uint32_t>(frame_id));
  h = splitmix64(h ^ static_cast<std::uint32_t>(gt_index));
  return h;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), std::max<std::size_t>(count, 1));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&]() {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

CandidateEvaluation evaluate_candidate(const TriMesh& pred_mesh, const Sim3Pose& pred_pose,
                                       const TriMesh& gt_mesh, const Sim3Pose& gt_pose,
                                       std::size_t n, std::uint64_t seed, const IcpParams& icp) {
  const PointList p = sim3_apply(pred_pose, sample_surface(pred_mesh, n, seed).points);
  const PointList g = sim3_apply(gt_pose, sample_surface(gt_mesh, n, seed).points);
  CandidateEvaluation e;
  e.add_sb = add_sb_points(p, g);
  e.gt_diameter = diameter(g);
  e.pred_diameter = diameter(p);
  e.cd_norm = chamfer_normalized(transformed(pred_mesh, pred_pose), transformed(gt_mesh, gt_pose),
                                 e.gt_diameter, n, seed, icp);
  return e;
}

Pointmap instance_pointmap(const SceneFrame& frame, std::size_t gt_index) {
  if (gt_index >= frame.instances.size()) {
    throw Error(ErrorKind::MalformedRecord, "GT index out of range");
  }
  return mask_pointmap(backproject(frame.depth, frame.intrinsics),
                       erode_mask(frame.instances[gt_index].visible));
}

EvalReport run_eval(const RunConfig& cfg) {
  cfg.validate();
  Dataset data = load_dataset(cfg, false);
  load_models(cfg, data);
  const Predictions preds = load_prediction_set(cfg);
  const std::vector<InstanceKey> keys = instance_keys(data);

  EvalReport report;
  report.dataset = cfg.dataset_root.filename().string();
  if (report.dataset.empty()) report.dataset = cfg.dataset_root.parent_path().filename().string();
  report.thresholds = cfg.thresholds;
  report.dre_threshold = cfg.dre_threshold;
  report.rows.resize(keys.size());

  parallel_for(keys.size(), cfg.workers, [&](std::size_t i) {
    const InstanceKey& key = keys[i];
    EvalRow& row = report.rows[i];
    row.scene_id = key.scene_id;
    row.frame_id = key.frame_id;
    row.gt_index = key.gt_index;
    if (key.gt_index < 0) {
      row.error = frame_error(data, key);
      return;
    }
    try {
      const SceneFrame& frame = frame_or_throw(data, key.scene_id, key.frame_id);
      const GtInstance& gt = instance_or_throw(frame, key.gt_index);
      row.obj_id = gt.obj_id;

      if (gt.amodal) {
        try {
          row.occlusion = occlusion_fraction(gt.visible, *gt.amodal);
          row.occlusion_bin = occlusion_bin(*row.occlusion);
        } catch (const Error&) {
          // Inconsistent or empty amodal masks leave occlusion unavailable.
        }
      }

      const auto found = preds.by_instance.find(key);
      if (found == preds.by_instance.end()) {
        throw Error(ErrorKind::MissingFile, "no prediction bundle for this instance");
      }
      const PredictionBundle& bundle = found->second.front();
      row.prediction_id = bundle.id;
      const PredictedPose& first = bundle.poses.front();
      if (first.frame_id != key.frame_id || first.gt_index != key.gt_index) {
        throw Error(ErrorKind::MalformedRecord, "first pose refers to another frame or instance");
      }
      const Sim3Pose pred_pose = first.candidate.camera_from_object();
      const std::uint64_t seed = instance_seed(cfg.seed, key.scene_id, key.frame_id, key.gt_index);
      const CandidateEvaluation ev = evaluate_candidate(
          bundle.mesh, pred_pose, model_or_throw(data, gt.obj_id), gt.pose, cfg.samples, seed, cfg.icp);

      row.add_sb = ev.add_sb;
      row.gt_diameter = ev.gt_diameter;
      row.pred_diameter = ev.pred_diameter;
      row.cd_norm = ev.cd_norm;
      for (double t : cfg.thresholds) row.recall_hits.push_back(ev.add_sb < t * ev.gt_diameter);
      row.dre = dre(ev.pred_diameter, ev.gt_diameter);
      row.dre_hit = row.dre < cfg.dre_threshold;

      try {
        const Pointmap pm = instance_pointmap(frame, static_cast<std::size_t>(key.gt_index));
        row.selection_score =
            alignment_score(bundle.mesh, first.candidate, pm, cfg.trim, cfg.samples, seed).value;
      } catch (const Error&) {
        // Too few observed points: the alignment score stays empty.
      }
      row.excluded = cfg.outlier_cap && row.add_sb >= *cfg.outlier_cap;
      row.ok = true;
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
  });

  for (const auto& [id, msg] : preds.errors) {
    EvalRow row;
    row.scene_id = row.frame_id = row.gt_index = -1;
    row.prediction_id = id;
    row.error = msg;
    report.rows.push_back(row);
  }
  report.aggregates = aggregate_eval(report);
  report.occlusion_out_of_range = count_out_of_range(report);
  return report;
}

SelectionMode parse_selection_mode(const std::string& s) {
  if (s == "single_view" || s == "single-view") return SelectionMode::SingleView;
  if (s == "cross_view" || s == "cross-view") return SelectionMode::CrossView;
  if (s == "multi_sample" || s == "multi-sample") return SelectionMode::MultiSample;
  if (s == "oracle") return SelectionMode::Oracle;
  throw Error(ErrorKind::InvalidConfig, "unknown selection mode '" + s + "'");
}

const char* to_string(SelectionMode m) {
  switch (m) {
    case SelectionMode::SingleView: return "single_view";
    case SelectionMode::CrossView: return "cross_view";
    case SelectionMode::MultiSample: return "multi_sample";
    case SelectionMode::Oracle: return "oracle";
  }
  return "?";
}

SelectionReport run_selection_study(const RunConfig& cfg, SelectionMode mode) {
  cfg.validate();
  Dataset data = load_dataset(cfg, true);
  load_models(cfg, data);
  const Predictions preds = load_prediction_set(cfg);
  const std::vector<InstanceKey> keys = instance_keys(data);
  const OracleCriterion criterion =
      mode == SelectionMode::MultiSample ? OracleCriterion::AddSb : OracleCriterion::Chamfer;

  SelectionReport report;
  report.mode = to_string(mode);
  report.oracle_criterion = criterion == OracleCriterion::AddSb ? "add_sb" : "chamfer";
  report.rows.resize(keys.size());

  parallel_for(keys.size(), cfg.workers, [&](std::size_t i) {
    const InstanceKey& key = keys[i];
    SelectionRow& row = report.rows[i];
    row.scene_id = key.scene_id;
    row.frame_id = key.frame_id;
    row.gt_index = key.gt_index;
    if (key.gt_index < 0) {
      row.error = frame_error(data, key);
      return;
    }
    try {
      const SceneFrame& frame = frame_or_throw(data, key.scene_id, key.frame_id);
      const GtInstance& gt = instance_or_throw(frame, key.gt_index);
      row.obj_id = gt.obj_id;
      const TriMesh& model = model_or_throw(data, gt.obj_id);
      const auto found = preds.by_instance.find(key);
      if (found == preds.by_instance.end()) {
        throw Error(ErrorKind::MissingFile, "no prediction bundle for this instance");
      }
      const auto& bundles = found->second;
      const std::uint64_t seed = instance_seed(cfg.seed, key.scene_id, key.frame_id, key.gt_index);

      std::vector<CandidateMetrics> metrics;
      Selection sel;
      if (mode == SelectionMode::MultiSample) {
        std::vector<GeneratedSample> samples;
        for (const auto& b : bundles) {
          samples.push_back({b.mesh, b.poses.front().candidate});
          const auto ev = evaluate_candidate(b.mesh, b.poses.front().candidate.camera_from_object(),
                                             model, gt.pose, cfg.samples, seed, cfg.icp);
          metrics.push_back({ev.add_sb, ev.cd_norm});
        }
        const Pointmap pm = instance_pointmap(frame, static_cast<std::size_t>(key.gt_index));
        sel = select_sample(samples, pm, cfg.trim, cfg.samples, seed);
      } else {
        const PredictionBundle& b = bundles.front();
        std::vector<PoseCandidate> cands;
        std::vector<Pointmap> pointmaps;
        std::vector<RigidTransform> cameras;
        bool have_cameras = true;
        for (const auto& p : b.poses) {
          const SceneFrame& vf = frame_or_throw(data, key.scene_id, p.frame_id);
          const GtInstance& vgt = instance_or_throw(vf, p.gt_index);
          if (vgt.obj_id != gt.obj_id) {
            throw Error(ErrorKind::MalformedRecord, "view " + std::to_string(p.view_id) +
                                                        " refers to a different object");
          }
          cands.push_back(p.candidate);
          pointmaps.push_back(instance_pointmap(vf, static_cast<std::size_t>(p.gt_index)));
          if (vf.world_from_camera) {
            cameras.push_back(*vf.world_from_camera);
          } else {
            have_cameras = false;
          }
          const auto ev = evaluate_candidate(b.mesh, p.candidate.camera_from_object(), model,
                                             vgt.pose, cfg.samples, seed, cfg.icp);
          metrics.push_back({ev.add_sb, ev.cd_norm});
        }
        if (mode == SelectionMode::SingleView) {
          sel = select_pose_single_view(b.mesh, cands, pointmaps, cfg.trim, cfg.samples, seed);
        } else if (mode == SelectionMode::CrossView) {
          if (!have_cameras) {
            throw Error(ErrorKind::MissingCameraPose, "scene_camera lacks cam_R_w2c / cam_t_w2c");
          }
          sel = select_pose_cross_view(b.mesh, cands, pointmaps, cameras, cfg.trim, cfg.samples,
                                       seed);
        } else {
          sel.index = oracle_select(metrics, criterion);
        }
      }

      row.candidates = metrics.size();
      row.selected = sel.index;
      row.scores = sel.scores;
      row.oracle = oracle_select(metrics, criterion);
      row.first_add_sb = metrics.front().add_sb;
      row.first_cd_norm = metrics.front().chamfer;
      row.selected_add_sb = metrics[row.selected].add_sb;
      row.selected_cd_norm = metrics[row.selected].chamfer;
      row.oracle_add_sb = metrics[row.oracle].add_sb;
      row.oracle_cd_norm = metrics[row.oracle].chamfer;
      for (const auto& m : metrics) {
        row.worst_add_sb = std::max(row.worst_add_sb, m.add_sb);
        row.worst_cd_norm = std::max(row.worst_cd_norm, m.chamfer);
      }
      row.ok = true;
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
  });

  report.count = static_cast<std::size_t>(
      std::count_if(report.rows.begin(), report.rows.end(), [](const SelectionRow& r) { return r.ok; }));
  report.aggregates = aggregate_selection(report);
  return report;
}

OcclusionReport run_occlusion_report(const RunConfig& cfg) {
  cfg.validate();
  const Dataset data = load_dataset(cfg, false);
  OcclusionReport report;
  for (const auto& key : instance_keys(data)) {
    OcclusionRow row;
    row.scene_id = key.scene_id;
    row.frame_id = key.frame_id;
    row.gt_index = key.gt_index;
    if (key.gt_index < 0) {
      row.note = frame_error(data, key);
      ++report.unavailable;
      report.rows.push_back(row);
      continue;
    }
    const GtInstance& gt = data.frames.at({key.scene_id, key.frame_id}).instances[key.gt_index];
    row.obj_id = gt.obj_id;
    row.visible_pixels = gt.visible.count();
    if (!gt.amodal) {
      row.note = "no amodal mask";
      ++report.unavailable;
    } else {
      row.amodal_pixels = gt.amodal->count();
      try {
        row.fraction = occlusion_fraction(gt.visible, *gt.amodal);
        row.bin = occlusion_bin(*row.fraction);
        ++report.bin_counts[static_cast<int>(*row.bin)];
      } catch (const Error& e) {
        row.note = e.what();
        ++report.unavailable;
      }
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace shapepose
