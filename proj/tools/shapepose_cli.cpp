// Command-line entry point: batch evaluation over BOP-format data, pose and
// sample selection studies, occlusion analytics and two small utilities.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "shapepose/errors.hpp"
#include "shapepose/flow.hpp"
#include "shapepose/harness.hpp"
#include "shapepose/icp.hpp"
#include "shapepose/mesh.hpp"

namespace {

using namespace shapepose;

void add_run_options(CLI::App& cmd, RunConfig& cfg, bool needs_predictions) {
  cmd.add_option("--dataset-root", cfg.dataset_root, "BOP dataset root")->required();
  if (needs_predictions) {
    cmd.add_option("--pred-root", cfg.pred_root, "Directory of prediction bundles")->required();
  }
  cmd.add_option("--frames", cfg.frames_file, "File of `scene frame` lines (default: all frames)");
  cmd.add_option("--split", cfg.split, "Dataset split directory")->capture_default_str();
  cmd.add_flag("--depth-scale-mm", cfg.depth_scale_in_mm,
               "Interpret depth_scale as millimeters per unit (upstream BOP convention)");
  cmd.add_option("--workers", cfg.workers, "Worker threads")->capture_default_str();
  cmd.add_option("--out", cfg.out, "Output directory")->required();
  if (needs_predictions) {
    cmd.add_option("--samples", cfg.samples, "Surface samples per mesh")->capture_default_str();
    cmd.add_option("--seed", cfg.seed, "Global sampling seed")->capture_default_str();
    cmd.add_option("--trim", cfg.trim, "Alignment-score trim fraction")->capture_default_str();
    cmd.add_option("--icp-iters", cfg.icp.max_iters, "ICP iterations before Chamfer (0 disables)")
        ->capture_default_str();
    cmd.add_option("--icp-tol", cfg.icp.tol, "ICP convergence tolerance on RMS change")
        ->capture_default_str();
  }
}

PointList load_cloud(const std::string& path) {
  const auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".ply" || ext == ".obj") return load_mesh(path).vertices;
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingFile, "cannot open " + path);
  PointList pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Eigen::Vector3d p;
    if (!(ls >> p.x() >> p.y() >> p.z())) {
      throw Error(ErrorKind::MalformedRecord, path + ": expected `x y z` per line");
    }
    pts.push_back(p);
  }
  return pts;
}

double distance(const FlowState& a, const FlowState& b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.latent.size(); ++i) {
    const double d = a.latent.values[i] - b.latent.values[i];
    sq += d * d;
  }
  for (std::size_t k = 0; k < a.pose_tokens.size(); ++k) {
    for (std::size_t i = 0; i < a.pose_tokens[k].size(); ++i) {
      const double d = a.pose_tokens[k][i] - b.pose_tokens[k][i];
      sq += d * d;
    }
  }
  return std::sqrt(sq);
}

struct FlowDemoOptions {
  int steps = 50;
  double cfg_scale = 3.0;
  std::uint64_t seed = 0;
  int latent_res = 4;
  int channels = 8;
  std::string pose_stats;
};

int run_flow_demo(const FlowDemoOptions& o) {
  SamplerConfig cfg{o.steps, o.cfg_scale, o.seed};
  cfg.validate();
  const std::array<int, 4> shape{o.latent_res, o.latent_res, o.latent_res, o.channels};

  std::optional<PoseStats> stats;
  if (!o.pose_stats.empty()) stats = load_pose_stats(o.pose_stats);
  const std::size_t width = stats ? stats->width() : rotation_width(RotationLayout::SixD) + 4;

  // The goal is a second noise draw for the latent and the dataset-mean pose
  // (all zeros after normalization) for the pose token.
  FlowState goal = gaussian_state(shape, 1, width, o.seed + 1);
  std::fill(goal.pose_tokens[0].begin(), goal.pose_tokens[0].end(), 0.0);
  const FlowState init = gaussian_state(shape, 1, width, o.seed);

  std::printf("# step t distance_to_goal latent_mean pose_token...\n");
  const auto log = [&](int step, double t, const FlowState& s) {
    double mean = 0.0;
    for (double v : s.latent.values) mean += v;
    mean /= static_cast<double>(s.latent.size());
    std::printf("%d %.17g %.17g %.17g", step, t, distance(s, goal), mean);
    for (double v : s.pose_tokens[0]) std::printf(" %.17g", v);
    std::printf("\n");
  };
  const FlowState final_state = euler_sample(fields::goal_seeking(goal), init, cfg, log);

  if (stats) {
    const Sim3Pose pose = pose_from_params(pose_denormalize(final_state.pose_tokens[0], *stats),
                                           stats->layout);
    const auto& q = pose.rotation.quaternion();
    std::printf("# final_pose qw qx qy qz tx ty tz s\n");
    std::printf("final_pose %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n", q.w(), q.x(), q.y(),
                q.z(), pose.translation.x(), pose.translation.y(), pose.translation.z(), pose.scale);
  }
  return 0;
}

int run_icp(const std::string& source, const std::string& target, const IcpParams& params) {
  const PointList src = load_cloud(source);
  const PointList dst = load_cloud(target);
  const IcpResult r = icp_align(src, dst, params);
  const Eigen::Matrix3d R = r.transform.rotation.matrix();
  const Eigen::Vector3d& t = r.transform.translation;
  std::printf("iterations %d\nconverged %d\n", r.iterations, r.converged ? 1 : 0);
  std::printf("rotation %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n", R(0, 0), R(0, 1),
              R(0, 2), R(1, 0), R(1, 1), R(1, 2), R(2, 0), R(2, 1), R(2, 2));
  std::printf("translation %.17g %.17g %.17g\n", t.x(), t.y(), t.z());
  for (std::size_t i = 0; i < r.rms_history.size(); ++i) {
    std::printf("rms %zu %.17g\n", i, r.rms_history[i]);
  }
  return 0;
}

template <class Rows>
std::size_t count_errors(const Rows& rows) {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.ok ? 0 : 1;
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shape/pose evaluation toolkit"};
  app.require_subcommand(1);

  RunConfig eval_cfg;
  std::optional<double> outlier_cap;
  auto* eval = app.add_subcommand("eval", "Per-instance metrics and aggregates");
  add_run_options(*eval, eval_cfg, true);
  eval->add_option("--outlier-cap", outlier_cap,
                   "Leave rows with ADD-SB (m) at or above this value out of aggregates");

  RunConfig sel_cfg;
  std::string mode = "single_view";
  auto* select = app.add_subcommand("select-pose", "First / selected / oracle comparison");
  add_run_options(*select, sel_cfg, true);
  select->add_option("--mode", mode, "single_view | cross_view | multi_sample | oracle")
      ->capture_default_str();

  RunConfig occ_cfg;
  auto* occ = app.add_subcommand("occlusion-report", "Occlusion fraction and bins per instance");
  add_run_options(*occ, occ_cfg, false);

  FlowDemoOptions flow;
  auto* demo = app.add_subcommand("flow-demo", "Sample with an analytic goal-seeking field");
  demo->add_option("--steps", flow.steps, "Euler steps")->capture_default_str();
  demo->add_option("--cfg-scale", flow.cfg_scale, "Guidance scale")->capture_default_str();
  demo->add_option("--seed", flow.seed, "Noise seed")->capture_default_str();
  demo->add_option("--latent-res", flow.latent_res, "Latent grid edge length")->capture_default_str();
  demo->add_option("--pose-stats", flow.pose_stats, "Pose statistics file for decoding the pose token");

  std::string source, target;
  IcpParams icp_params;
  auto* icp = app.add_subcommand("icp", "Rigid point-to-point ICP between two point clouds");
  icp->add_option("source", source, "Source cloud (.ply, .obj or `x y z` lines)")->required();
  icp->add_option("target", target, "Target cloud")->required();
  icp->add_option("--icp-iters", icp_params.max_iters, "Maximum iterations")->capture_default_str();
  icp->add_option("--icp-tol", icp_params.tol, "Tolerance on RMS change")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*eval) {
      eval_cfg.outlier_cap = outlier_cap;
      const EvalReport r = run_eval(eval_cfg);
      emit_report(r, eval_cfg.out);
      std::printf("evaluated %zu rows (%zu errors) -> %s\n", r.rows.size(), count_errors(r.rows),
                  eval_cfg.out.string().c_str());
    } else if (*select) {
      const SelectionReport r = run_selection_study(sel_cfg, parse_selection_mode(mode));
      emit_report(r, sel_cfg.out);
      std::printf("selection study (%s): %zu rows (%zu errors) -> %s\n", r.mode.c_str(),
                  r.rows.size(), count_errors(r.rows), sel_cfg.out.string().c_str());
    } else if (*occ) {
      const OcclusionReport r = run_occlusion_report(occ_cfg);
      emit_report(r, occ_cfg.out);
      std::printf("occlusion report: %zu instances (%zu unavailable) -> %s\n", r.rows.size(),
                  r.unavailable, occ_cfg.out.string().c_str());
    } else if (*demo) {
      return run_flow_demo(flow);
    } else if (*icp) {
      return run_icp(source, target, icp_params);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
