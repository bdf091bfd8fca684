#pragma once

#include <array>
#include <cmath>

#include "solo9/core/types.hpp"

namespace solo9 {

/// Reward weights and shaping constants. Sign convention: penalty weights are
/// <= 0, tracking/imitation weights >= 0, and the imitation mix lies in [0,1].
struct RewardWeights {
  // Yaw-rate tracking (turning reward).
  double c_angvel = 1.0;
  double angvel_sigma = 0.25;
  bool literal_exp_sign = false;  // positive exponent variant, off by default

  // Constraint rewards.
  double c_slip = -0.1;
  double c_clear = -15.0;
  double c_smooth = -0.05;
  double p_z_max = 0.06;

  // Gait rewards: foot air time, torque penalty, base-height regularizer.
  double c_air_time = 1.0;
  double air_time_target = 0.3;
  double c_torque = -0.0002;
  double c_base_height = -20.0;
  double base_height_target = 0.20;

  double w_imitation = 0.5;

  void validate() const {
    if (w_imitation < 0.0 || w_imitation > 1.0)
      throw ValidationError("w_imitation must lie in [0, 1]");
    if (c_angvel < 0 || c_air_time < 0)
      throw ValidationError("tracking/gait bonus weights must be >= 0");
    if (c_slip > 0 || c_clear > 0 || c_smooth > 0 || c_torque > 0 || c_base_height > 0)
      throw ValidationError("penalty weights must be <= 0");
  }
};

/// Yaw-rate tracking kernel. Default: c * exp(-|cmd - actual|^2 / sigma^2).
/// The literal variant flips the exponent sign (unbounded in the error) and
/// exists for comparison runs only.
inline double reward_angvel(double v_cmd, double v_wz, double c_angvel, double sigma = 0.25,
                            bool literal_exp_sign = false) {
  double e2 = (v_cmd - v_wz) * (v_cmd - v_wz);
  return literal_exp_sign ? c_angvel * std::exp(e2)
                          : c_angvel * std::exp(-e2 / (sigma * sigma));
}

/// Foot-slip penalty: c * sum_i C_i * |pdot_xy,i|^2 over the four feet.
inline double reward_slip(const std::array<bool, 4>& contact,
                          const Eigen::Matrix<double, 2, 4>& foot_vel_xy, double c_slip) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i)
    if (contact[static_cast<size_t>(i)]) s += foot_vel_xy.col(i).squaredNorm();
  return c_slip * s;
}

/// Clearance penalty: c * sum_i |p_z,i - p_z_max|^2 * |pdot_xy,i|^2.
inline double reward_clearance(const Vec4& foot_height,
                               const Eigen::Matrix<double, 2, 4>& foot_vel_xy, double p_z_max,
                               double c_clear) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    double dh = foot_height[i] - p_z_max;
    s += dh * dh * foot_vel_xy.col(i).squaredNorm();
  }
  return c_clear * s;
}

/// Action-rate penalty: c * |q_target_t - q_target_{t-1}|^2.
inline double reward_smooth(const Eigen::Ref<const VecX>& q_target_t,
                            const Eigen::Ref<const VecX>& q_target_prev, double c_smooth) {
  return c_smooth * (q_target_t - q_target_prev).squaredNorm();
}

/// Total task reward r_task = r_constraint + r_gait + r_turn, mixed with the
/// imitation reward as a convex combination.
inline double total_reward(double r_imitation, double r_gait, double r_constraint,
                           double r_turn, double w_imitation) {
  double r_task = r_constraint + r_gait + r_turn;
  return w_imitation * r_imitation + (1.0 - w_imitation) * r_task;
}

}  // namespace solo9
