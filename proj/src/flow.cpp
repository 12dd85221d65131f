#include "shapepose/flow.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "shapepose/errors.hpp"

namespace shapepose {

namespace {

std::size_t product(const std::array<int, 4>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw Error(ErrorKind::ShapeMismatch, "latent dimensions must be positive");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

void require_same_shape(const FlowState& a, const FlowState& b) {
  if (!a.same_shape(b)) throw Error(ErrorKind::ShapeMismatch, "flow states differ in shape");
}

// out = ca * a + cb * b elementwise.
FlowState affine(const FlowState& a, double ca, const FlowState& b, double cb) {
  require_same_shape(a, b);
  FlowState out = a;
  for (std::size_t i = 0; i < out.latent.values.size(); ++i) {
    out.latent.values[i] = ca * a.latent.values[i] + cb * b.latent.values[i];
  }
  for (std::size_t k = 0; k < out.pose_tokens.size(); ++k) {
    for (std::size_t i = 0; i < out.pose_tokens[k].size(); ++i) {
      out.pose_tokens[k][i] = ca * a.pose_tokens[k][i] + cb * b.pose_tokens[k][i];
    }
  }
  return out;
}

}  // namespace

LatentGrid::LatentGrid() : values(product(shape), 0.0) {}

LatentGrid::LatentGrid(std::array<int, 4> s, double fill) : shape(s), values(product(s), fill) {}

bool FlowState::same_shape(const FlowState& other) const {
  if (latent.shape != other.latent.shape || latent.values.size() != other.latent.values.size()) {
    return false;
  }
  if (pose_tokens.size() != other.pose_tokens.size()) return false;
  for (std::size_t k = 0; k < pose_tokens.size(); ++k) {
    if (pose_tokens[k].size() != other.pose_tokens[k].size()) return false;
  }
  return true;
}

bool FlowState::all_finite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(latent.values.begin(), latent.values.end(), finite)) return false;
  for (const auto& tok : pose_tokens) {
    if (!std::all_of(tok.begin(), tok.end(), finite)) return false;
  }
  return true;
}

void SamplerConfig::validate() const {
  if (steps < 1) throw Error(ErrorKind::DegenerateInput, "sampler needs at least one step");
  if (!(cfg_scale >= 0.0)) throw Error(ErrorKind::DegenerateInput, "cfg scale must be >= 0");
}

FlowState cfm_interpolate(const FlowState& x0, const FlowState& x1, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorKind::DegenerateInput, "interpolation time outside [0, 1]");
  }
  // Endpoints are returned verbatim so t = 0 / 1 are exact.
  require_same_shape(x0, x1);
  if (t == 0.0) return x0;
  if (t == 1.0) return x1;
  return affine(x0, 1.0 - t, x1, t);
}

FlowState cfm_velocity_target(const FlowState& x0, const FlowState& x1) {
  return affine(x1, 1.0, x0, -1.0);
}

double joint_cfm_loss(const FlowState& pred, const FlowState& target, double alpha) {
  require_same_shape(pred, target);
  double latent_sq = 0.0;
  for (std::size_t i = 0; i < pred.latent.values.size(); ++i) {
    const double d = pred.latent.values[i] - target.latent.values[i];
    latent_sq += d * d;
  }
  double pose_sq = 0.0;
  std::size_t pose_n = 0;
  for (std::size_t k = 0; k < pred.pose_tokens.size(); ++k) {
    for (std::size_t i = 0; i < pred.pose_tokens[k].size(); ++i) {
      const double d = pred.pose_tokens[k][i] - target.pose_tokens[k][i];
      pose_sq += d * d;
      ++pose_n;
    }
  }
  const double latent_mse =
      pred.latent.values.empty() ? 0.0 : latent_sq / static_cast<double>(pred.latent.values.size());
  const double pose_mse = pose_n == 0 ? 0.0 : pose_sq / static_cast<double>(pose_n);
  return latent_mse + alpha * pose_mse;
}

FlowState cfg_combine(const FlowState& v_cond, const FlowState& v_uncond, double scale) {
  require_same_shape(v_cond, v_uncond);
  if (scale == 1.0) return v_cond;
  if (scale == 0.0) return v_uncond;
  FlowState out = v_uncond;
  for (std::size_t i = 0; i < out.latent.values.size(); ++i) {
    out.latent.values[i] += scale * (v_cond.latent.values[i] - v_uncond.latent.values[i]);
  }
  for (std::size_t k = 0; k < out.pose_tokens.size(); ++k) {
    for (std::size_t i = 0; i < out.pose_tokens[k].size(); ++i) {
      out.pose_tokens[k][i] += scale * (v_cond.pose_tokens[k][i] - v_uncond.pose_tokens[k][i]);
    }
  }
  return out;
}

FlowState euler_sample(const VelocityField& v, const FlowState& init, const SamplerConfig& cfg) {
  return euler_sample(v, init, cfg, TrajectoryObserver{});
}

FlowState euler_sample(const VelocityField& v, const FlowState& init, const SamplerConfig& cfg,
                       const TrajectoryObserver& observer) {
  cfg.validate();
  if (!init.all_finite()) throw Error(ErrorKind::NonFiniteState, "initial state is not finite");
  const double dt = 1.0 / cfg.steps;
  FlowState x = init;
  for (int k = 0; k < cfg.steps; ++k) {
    const double t = static_cast<double>(k) / cfg.steps;
    FlowState vel = v(x, t, Guidance::Conditional);
    if (cfg.cfg_scale != 1.0) {
      vel = cfg_combine(vel, v(x, t, Guidance::Unconditional), cfg.cfg_scale);
    }
    x = affine(x, 1.0, vel, dt);
    if (!x.all_finite()) {
      throw Error(ErrorKind::NonFiniteState, "state became non-finite at step " + std::to_string(k));
    }
    if (observer) observer(k, static_cast<double>(k + 1) / cfg.steps, x);
  }
  return x;
}

FlowState gaussian_state(std::array<int, 4> latent_shape, std::size_t tokens,
                         std::size_t token_width, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  FlowState s;
  s.latent = LatentGrid(latent_shape);
  for (auto& v : s.latent.values) v = normal(rng);
  s.pose_tokens.assign(tokens, std::vector<double>(token_width));
  for (auto& tok : s.pose_tokens) {
    for (auto& v : tok) v = normal(rng);
  }
  return s;
}

JointSample denoise_joint(const VelocityField& v, std::uint64_t noise_seed, const PoseStats& stats,
                          const SamplerConfig& cfg, std::size_t views,
                          std::array<int, 4> latent_shape) {
  if (views < 1) throw Error(ErrorKind::DegenerateInput, "at least one pose token is required");
  if (stats.mean.size() != stats.width() || stats.stddev.size() != stats.width()) {
    throw Error(ErrorKind::LayoutMismatch, "pose statistics do not match their rotation layout");
  }
  const FlowState init = gaussian_state(latent_shape, views, stats.width(), noise_seed);
  FlowState x = euler_sample(v, init, cfg);
  if (!x.same_shape(init)) throw Error(ErrorKind::ShapeMismatch, "velocity changed state shape");

  JointSample out;
  out.latent = std::move(x.latent);
  out.poses.reserve(views);
  for (const auto& tok : x.pose_tokens) {
    out.poses.push_back(pose_from_params(pose_denormalize(tok, stats), stats.layout));
  }
  return out;
}

namespace fields {

VelocityField constant(FlowState c) {
  return [c = std::move(c)](const FlowState& x, double, Guidance) {
    if (!x.same_shape(c)) throw Error(ErrorKind::ShapeMismatch, "constant field shape mismatch");
    return c;
  };
}

VelocityField linear(double rate) {
  return [rate](const FlowState& x, double, Guidance) {
    FlowState out = x;
    for (auto& v : out.latent.values) v *= rate;
    for (auto& tok : out.pose_tokens) {
      for (auto& v : tok) v *= rate;
    }
    return out;
  };
}

VelocityField goal_seeking(FlowState goal, double min_remaining) {
  return [goal = std::move(goal), min_remaining](const FlowState& x, double t, Guidance) {
    const double remaining = std::max(1.0 - t, min_remaining);
    return affine(goal, 1.0 / remaining, x, -1.0 / remaining);
  };
}

}  // namespace fields

}  // namespace shapepose
