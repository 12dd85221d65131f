#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "shapepose/pose.hpp"

namespace shapepose {

/// Opaque latent feature grid, 16x16x16x8 by default.
struct LatentGrid {
  std::array<int, 4> shape{16, 16, 16, 8};
  std::vector<double> values;

  LatentGrid();
  explicit LatentGrid(std::array<int, 4> shape, double fill = 0.0);

  std::size_t size() const { return values.size(); }
};

/// Joint sampler state: the latent grid plus one normalized pose token per view.
struct FlowState {
  LatentGrid latent;
  std::vector<std::vector<double>> pose_tokens;

  bool same_shape(const FlowState& other) const;
  bool all_finite() const;
};

enum class Guidance { Conditional, Unconditional };

/// (state, t, guidance) -> velocity with the same shape as state.
using VelocityField = std::function<FlowState(const FlowState&, double, Guidance)>;

struct SamplerConfig {
  int steps = 50;
  double cfg_scale = 3.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Rectified-flow path (1 - t) x0 + t x1. t = 0 is noise, t = 1 is data.
FlowState cfm_interpolate(const FlowState& x0, const FlowState& x1, double t);
/// Constant velocity of the straight path: x1 - x0.
FlowState cfm_velocity_target(const FlowState& x0, const FlowState& x1);

/// MSE over latent entries + alpha * MSE over pose-token entries.
double joint_cfm_loss(const FlowState& pred, const FlowState& target, double alpha = 0.01);

/// v_uncond + scale (v_cond - v_uncond)
FlowState cfg_combine(const FlowState& v_cond, const FlowState& v_uncond, double scale);

/// Left-endpoint Euler from t = 0 to t = 1 with uniform steps. Each step
/// evaluates the guided velocity cfg_combine(v(x, t, cond), v(x, t, uncond)).
FlowState euler_sample(const VelocityField& v, const FlowState& init, const SamplerConfig& cfg);

/// Called after every Euler step with (step index, time after the step, state).
using TrajectoryObserver = std::function<void(int, double, const FlowState&)>;
FlowState euler_sample(const VelocityField& v, const FlowState& init, const SamplerConfig& cfg,
                       const TrajectoryObserver& observer);

/// Standard-normal state of the given layout drawn from seed.
FlowState gaussian_state(std::array<int, 4> latent_shape, std::size_t tokens,
                         std::size_t token_width, std::uint64_t seed);

struct JointSample {
  LatentGrid latent;
  std::vector<Sim3Pose> poses;
};

/// Samples the joint state from seeded noise, then denormalizes every pose
/// token with stats and recovers its rotation according to stats.layout.
JointSample denoise_joint(const VelocityField& v, std::uint64_t noise_seed, const PoseStats& stats,
                          const SamplerConfig& cfg, std::size_t views = 1,
                          std::array<int, 4> latent_shape = {16, 16, 16, 8});

namespace fields {

/// v(x, t) = c, independent of guidance.
VelocityField constant(FlowState c);
/// v(x, t) = rate * x.
VelocityField linear(double rate);
/// v(x, t) = (goal - x) / max(1 - t, min_remaining); reaches goal at t = 1.
VelocityField goal_seeking(FlowState goal, double min_remaining = 1e-6);

}  // namespace fields

}  // namespace shapepose
