#pragma once

#include "solo9/core/rng.hpp"
#include "solo9/core/types.hpp"

namespace solo9 {

/// Per-episode domain randomization ranges. Friction and initial joint angles
/// are multipliers, base mass is additive kilograms on the trunk, center of
/// mass is a centimeter offset per axis, commands are absolute.
struct RandomizationRanges {
  Vec2 friction = Vec2(0.2, 2.5);
  Vec2 base_mass = Vec2(-0.7, 1.5);          // kg
  Vec2 center_of_mass = Vec2(-1.5, 1.5);     // cm
  Vec2 initial_joint_angles = Vec2(0.9, 1.1);
  Vec2 lin_vel_cmd = Vec2(0.0, 1.0);         // m/s
  Vec2 ang_vel_cmd = Vec2(-0.5, 0.5);        // rad/s

  void validate() const {
    for (const Vec2* r : {&friction, &base_mass, &center_of_mass, &initial_joint_angles,
                          &lin_vel_cmd, &ang_vel_cmd})
      if (r->x() > r->y()) throw ValidationError("randomization range lower > upper");
  }
};

/// Sampled per-env physical overrides plus the episode command.
struct EnvOverrides {
  double friction_mult = 1.0;
  double added_base_mass = 0.0;  // kg, split across the trunk links
  Vec3 com_offset = Vec3::Zero();  // m
  double init_angle_mult = 1.0;
  double cmd_lin = 0.0;   // m/s
  double cmd_ang = 0.0;   // rad/s
};

/// Uniform samples from the ranges, deterministic per seed. Resamples the
/// mass delta (bounded retries) if it would drive the trunk mass, given as
/// `trunk_mass`, to zero or below.
inline EnvOverrides randomize_env(const RandomizationRanges& ranges, uint64_t seed,
                                  double trunk_mass) {
  ranges.validate();
  Rng rng(seed);
  EnvOverrides o;
  o.friction_mult = rng.uniform(ranges.friction.x(), ranges.friction.y());
  o.added_base_mass = rng.uniform(ranges.base_mass.x(), ranges.base_mass.y());
  int retries = 0;
  while (trunk_mass + o.added_base_mass <= 1e-6) {
    if (++retries > 32)
      throw ValidationError("randomized base mass cannot stay positive within the range");
    o.added_base_mass = rng.uniform(ranges.base_mass.x(), ranges.base_mass.y());
  }
  for (int a = 0; a < 3; ++a)
    o.com_offset[a] = 0.01 * rng.uniform(ranges.center_of_mass.x(), ranges.center_of_mass.y());
  o.init_angle_mult =
      rng.uniform(ranges.initial_joint_angles.x(), ranges.initial_joint_angles.y());
  o.cmd_lin = rng.uniform(ranges.lin_vel_cmd.x(), ranges.lin_vel_cmd.y());
  o.cmd_ang = rng.uniform(ranges.ang_vel_cmd.x(), ranges.ang_vel_cmd.y());
  return o;
}

}  // namespace solo9
