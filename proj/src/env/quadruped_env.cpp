#include "solo9/env/quadruped_env.hpp"

#include <cmath>

namespace solo9 {

EnvConfig EnvConfig::from_config(const Config& cfg) {
  EnvConfig e;
  e.control_hz = cfg.get_double("sim", "control_hz", e.control_hz);
  e.substeps = cfg.get_int("sim", "substeps", e.substeps);
  e.world.gravity = cfg.get_double("sim", "gravity", e.world.gravity);
  e.world.contact.stiffness = cfg.get_double("sim", "contact_stiffness", e.world.contact.stiffness);
  e.world.contact.damping = cfg.get_double("sim", "contact_damping", e.world.contact.damping);
  e.world.contact.friction = cfg.get_double("sim", "friction", e.world.contact.friction);
  e.world.contact.tangent_damping =
      cfg.get_double("sim", "tangent_damping", e.world.contact.tangent_damping);
  e.world.contact.filter_window =
      cfg.get_int("sim", "contact_filter_window", e.world.contact.filter_window);

  RewardWeights& r = e.rewards;
  r.c_angvel = cfg.get_double("rewards", "c_angvel", r.c_angvel);
  r.angvel_sigma = cfg.get_double("rewards", "angvel_sigma", r.angvel_sigma);
  r.literal_exp_sign = cfg.get_bool("rewards", "literal_eq1", r.literal_exp_sign);
  r.c_slip = cfg.get_double("rewards", "c_slip", r.c_slip);
  r.c_clear = cfg.get_double("rewards", "c_clear", r.c_clear);
  r.c_smooth = cfg.get_double("rewards", "c_smooth", r.c_smooth);
  r.p_z_max = cfg.get_double("rewards", "p_z_max", r.p_z_max);
  r.c_air_time = cfg.get_double("rewards", "c_air_time", r.c_air_time);
  r.air_time_target = cfg.get_double("rewards", "air_time_target", r.air_time_target);
  r.c_torque = cfg.get_double("rewards", "c_torque", r.c_torque);
  r.c_base_height = cfg.get_double("rewards", "c_base_height", r.c_base_height);
  r.base_height_target = cfg.get_double("rewards", "base_height_target", r.base_height_target);
  r.w_imitation = cfg.get_double("rewards", "w_imitation", r.w_imitation);
  r.validate();

  e.randomize = cfg.get_bool("randomization", "enabled", e.randomize);
  auto range = [&](const char* key, Vec2 fallback) {
    if (!cfg.has("randomization", key)) return fallback;
    VecX v = cfg.get_vector("randomization", key);
    if (v.size() != 2) throw ValidationError(std::string("range '") + key + "' needs lo hi");
    return Vec2(v[0], v[1]);
  };
  e.ranges.friction = range("friction", e.ranges.friction);
  e.ranges.base_mass = range("base_mass", e.ranges.base_mass);
  e.ranges.center_of_mass = range("center_of_mass", e.ranges.center_of_mass);
  e.ranges.initial_joint_angles = range("initial_joint_angles", e.ranges.initial_joint_angles);
  e.ranges.lin_vel_cmd = range("lin_vel_cmd", e.ranges.lin_vel_cmd);
  e.ranges.ang_vel_cmd = range("ang_vel_cmd", e.ranges.ang_vel_cmd);
  e.ranges.validate();

  e.curriculum = cfg.get_bool("curriculum", "enabled", e.curriculum);
  e.max_level = cfg.get_int("curriculum", "max_level", e.max_level);
  e.walk_target = cfg.get_double("curriculum", "walk_target", e.walk_target);
  e.pd_easy_scale = cfg.get_double("curriculum", "pd_easy_scale", e.pd_easy_scale);
  std::string kind = cfg.get_string("curriculum", "terrain_kind", "flat");
  if (kind == "flat") e.terrain_kind = TerrainKind::flat;
  else if (kind == "uneven") e.terrain_kind = TerrainKind::uneven;
  else if (kind == "steps") e.terrain_kind = TerrainKind::steps;
  else throw ValidationError("unknown terrain kind '" + kind + "'");
  e.terrain.amplitude = cfg.get_double("curriculum", "terrain_amplitude", 0.035);

  e.min_base_height = cfg.get_double("termination", "min_base_height", e.min_base_height);
  e.max_tilt = cfg.get_double("termination", "max_tilt", e.max_tilt);
  e.horizon = cfg.get_double("termination", "horizon", e.horizon);

  std::string mode = cfg.get_string("action", "mode", "pd_target");
  if (mode == "pd_target") e.action_mode = ActionMode::pd_target;
  else if (mode == "direct_torque") e.action_mode = ActionMode::direct_torque;
  else throw ValidationError("unknown action mode '" + mode + "'");
  e.kp = cfg.get_double("action", "kp", e.kp);
  e.kd = cfg.get_double("action", "kd", e.kd);
  e.action_scale = cfg.get_double("action", "scale", e.action_scale);
  return e;
}

VecX apply_action(const Eigen::Ref<const VecX>& action, ActionMode mode, double kp, double kd,
                  double scale, const VecX& default_q, const VecX& q, const VecX& qd,
                  const std::vector<double>& torque_limits) {
  if (!action.allFinite()) throw SimulationError("non-finite action");
  const int n = static_cast<int>(action.size());
  VecX tau(n);
  if (mode == ActionMode::pd_target) {
    for (int j = 0; j < n; ++j) {
      double target = default_q[j] + scale * action[j];
      tau[j] = kp * (target - q[j]) - kd * qd[j];
    }
  } else {
    for (int j = 0; j < n; ++j) tau[j] = torque_limits[static_cast<size_t>(j)] * action[j];
  }
  for (int j = 0; j < n; ++j) {
    double lim = torque_limits[static_cast<size_t>(j)];
    tau[j] = std::clamp(tau[j], -lim, lim);
  }
  return tau;
}

VecX action_target(const Eigen::Ref<const VecX>& action, ActionMode mode, double scale,
                   const VecX& default_q, const std::vector<double>& torque_limits) {
  VecX t(action.size());
  if (mode == ActionMode::pd_target) {
    for (int j = 0; j < t.size(); ++j) t[j] = default_q[j] + scale * action[j];
  } else {
    for (int j = 0; j < t.size(); ++j)
      t[j] = torque_limits[static_cast<size_t>(j)] * std::clamp(action[j], -1.0, 1.0);
  }
  return t;
}

VecX build_actor_observation(const SimState& state, const Vec2& command, const VecX& q_prev) {
  const int n = static_cast<int>(state.q.size());
  VecX obs(6 + 3 * n);
  obs[0] = state.base_quat.w();
  obs[1] = state.base_quat.x();
  obs[2] = state.base_quat.y();
  obs[3] = state.base_quat.z();
  obs[4] = command.x();
  obs[5] = command.y();
  obs.segment(6, n) = state.q;
  obs.segment(6 + n, n) = state.qd;
  obs.segment(6 + 2 * n, n) = q_prev;
  return obs;
}

VecX build_critic_observation(const VecX& actor_obs, const SimState& state) {
  VecX obs(actor_obs.size() + 3);
  obs.head(actor_obs.size()) = actor_obs;
  // Privileged: base linear velocity in the body frame.
  obs.tail<3>() = lin_part(state.base_vel);
  return obs;
}

Termination check_termination(const SimState& state, double ground_height, double min_height,
                              double max_tilt, bool nonfoot_contact, double horizon) {
  Mat3 R = state.base_quat.toRotationMatrix();
  double roll = std::atan2(R(2, 1), R(2, 2));
  double pitch = -std::asin(std::clamp(R(2, 0), -1.0, 1.0));
  bool fallen = (state.base_pos.z() - ground_height) < min_height ||
                std::abs(roll) > max_tilt || std::abs(pitch) > max_tilt || nonfoot_contact;
  if (fallen) return Termination::fallen;
  if (state.time >= horizon) return Termination::timeout;
  return Termination::alive;
}

QuadrupedEnv::QuadrupedEnv(const RobotSpec& spec, const EnvConfig& cfg, uint64_t seed)
    : spec_(spec),
      cfg_(cfg),
      world_(spec, cfg.world),
      pristine_model_(world_.model()),
      base_friction_(cfg.world.contact.friction),
      rng_(seed),
      push_rng_(seed ^ 0x70757368ull) {
  trunk_links_.push_back(0);
  if (spec_.base_split_index > 0) trunk_links_.push_back(spec_.base_split_index);
  int wi = spec_.waist_joint();
  if (wi >= 0 && spec_.joints[static_cast<size_t>(wi)].actuated()) {
    // The waist dof index equals the number of actuated joints declared
    // before it.
    int dof = 0;
    for (int j = 0; j < wi; ++j)
      if (spec_.joints[static_cast<size_t>(j)].actuated()) ++dof;
    waist_dof_ = dof;
  }
  state_ = world_.make_state();
  q_prev_ = state_.q;
  prev_target_ = spec_.default_pose();
  last_torques_ = VecX::Zero(nq());
  reset();
}

double QuadrupedEnv::ground_height_under_base() const {
  return world_.terrain().height_at(state_.base_pos.x(), state_.base_pos.y());
}

void QuadrupedEnv::place_at_rest_pose(double angle_mult) {
  state_ = world_.make_state();
  state_.q = spec_.default_pose() * angle_mult;
  state_.base_pos = Vec3::Zero();
  state_.base_quat = Quat::Identity();
  // Drop the base so the lowest collision point sits just above the ground.
  double low = 1e9;
  for (int p = 0; p < static_cast<int>(world_.model().points.size()); ++p)
    low = std::min(low, world_.point_position(state_, p).z());
  double ground = world_.terrain().height_at(0.0, 0.0);
  state_.base_pos.z() = ground - low + 0.002;
}

void QuadrupedEnv::reset() {
  Rng episode_rng = rng_.fork(++episode_counter_);
  push_rng_ = episode_rng.fork(0x5075ull);

  // Curriculum advances on the walked distance of the finished episode.
  if (cfg_.curriculum)
    curriculum_ = curriculum_update(curriculum_, walked_distance(), cfg_.walk_target,
                                    cfg_.max_level, episode_rng);

  // Restore the pristine dynamics, then apply this episode's randomization.
  world_.mutable_model() = pristine_model_;
  world_.params().contact.friction = base_friction_;
  overrides_ = EnvOverrides{};
  double angle_mult = 1.0;
  if (cfg_.randomize) {
    double trunk_mass = 0.0;
    for (int l : trunk_links_) trunk_mass += pristine_model_.bodies[static_cast<size_t>(l)].inertia.mass;
    overrides_ = randomize_env(cfg_.ranges, episode_rng.next_u64(), trunk_mass);
    world_.params().contact.friction = base_friction_ * overrides_.friction_mult;
    for (int l : trunk_links_) {
      SpatialInertia& in = world_.mutable_model().bodies[static_cast<size_t>(l)].inertia;
      double share = in.mass / trunk_mass;
      Vec3 com = in.mass > 0 ? Vec3(in.h / in.mass) : Vec3::Zero();
      in.add_point_mass(share * overrides_.added_base_mass, com);
      in.shift_com(overrides_.com_offset);
    }
    angle_mult = overrides_.init_angle_mult;
  }
  command_ = fixed_command_ ? *fixed_command_ : Vec2(overrides_.cmd_lin, overrides_.cmd_ang);

  // Terrain: explicit evaluation terrain wins; otherwise the curriculum
  // scales the training terrain amplitude.
  if (eval_terrain_) {
    world_.set_terrain(*eval_terrain_);
  } else if (cfg_.terrain_kind == TerrainKind::flat || !cfg_.curriculum) {
    world_.set_terrain(Terrain());
  } else {
    double frac = cfg_.max_level > 0 ? static_cast<double>(curriculum_.terrain_level) / cfg_.max_level : 1.0;
    TerrainParams tp = cfg_.terrain;
    if (cfg_.terrain_kind == TerrainKind::uneven) {
      tp.amplitude = std::max(1e-4, cfg_.terrain.amplitude * frac);
      world_.set_terrain(frac <= 0.0 ? Terrain()
                                     : Terrain::generate(TerrainKind::uneven, tp,
                                                         episode_rng.next_u64()));
    } else {
      for (auto& h : tp.step_heights) h *= std::max(frac, 0.25);
      world_.set_terrain(Terrain::generate(cfg_.terrain_kind, tp, episode_rng.next_u64()));
    }
  }

  place_at_rest_pose(angle_mult);
  q_prev_ = state_.q;
  prev_target_ = spec_.default_pose();
  last_torques_.setZero();
  air_time_.setZero();
  prev_contact_ = {false, false, false, false};
  spawn_xy_ = state_.base_pos.head<2>();
  episode_start_time_ = state_.time = 0.0;
}

double QuadrupedEnv::walked_distance() const {
  return (state_.base_pos.head<2>() - spawn_xy_).norm();
}

QuadrupedEnv::StepResult QuadrupedEnv::step(const VecX& action) {
  StepResult out;
  const double dt = cfg_.control_dt();

  // PD curriculum: gains start stiff (easy) and relax toward the target.
  double gain_scale = 1.0;
  if (cfg_.curriculum && cfg_.max_level > 0) {
    double frac = static_cast<double>(curriculum_.pd_gain_level) / cfg_.max_level;
    gain_scale = cfg_.pd_easy_scale + (1.0 - cfg_.pd_easy_scale) * frac;
  }
  VecX q_at_entry = state_.q;
  VecX tau = apply_action(action, cfg_.action_mode, cfg_.kp * gain_scale, cfg_.kd * gain_scale,
                          cfg_.action_scale, spec_.default_pose(), state_.q, state_.qd,
                          world_.model().torque_limit);
  if (waist_unpowered_ && waist_dof_ >= 0) tau[waist_dof_] = 0.0;
  last_torques_ = tau;

  if (push_magnitude_ > 0.0) {
    double theta = push_rng_.uniform(0.0, 2.0 * M_PI);
    apply_push(state_, push_magnitude_ * Vec2(std::cos(theta), std::sin(theta)));
  }

  state_.nonfoot_contact = false;
  try {
    for (int s = 0; s < cfg_.substeps; ++s)
      world_.step(state_, tau, cfg_.substep_dt());
  } catch (const SimulationError&) {
    out.sim_error = true;
    out.termination = Termination::fallen;
    return out;
  }

  const RewardWeights& rw = cfg_.rewards;
  auto feet = world_.foot_kinematics(state_);
  std::array<bool, 4> contact{};
  Eigen::Matrix<double, 2, 4> foot_vel_xy;
  Vec4 foot_h;
  for (int f = 0; f < 4; ++f) {
    contact[static_cast<size_t>(f)] = feet[static_cast<size_t>(f)].contact;
    foot_vel_xy.col(f) = feet[static_cast<size_t>(f)].plane_vel;
    foot_h[f] = feet[static_cast<size_t>(f)].height;
  }

  out.r_turn = reward_angvel(command_.y(), state_.base_ang_vel_world().z(), rw.c_angvel,
                             rw.angvel_sigma, rw.literal_exp_sign);

  VecX target = action_target(action, cfg_.action_mode, cfg_.action_scale, spec_.default_pose(),
                              world_.model().torque_limit);
  out.r_constraint = reward_slip(contact, foot_vel_xy, rw.c_slip) +
                     reward_clearance(foot_h, foot_vel_xy, rw.p_z_max, rw.c_clear) +
                     reward_smooth(target, prev_target_, rw.c_smooth);
  prev_target_ = target;

  double r_air = 0.0;
  for (int f = 0; f < 4; ++f) {
    bool c = contact[static_cast<size_t>(f)];
    if (!c) air_time_[f] += dt;
    if (c && !prev_contact_[static_cast<size_t>(f)] && command_.norm() > 0.05) {
      r_air += rw.c_air_time * (air_time_[f] - rw.air_time_target);
      air_time_[f] = 0.0;
    }
    if (c) air_time_[f] = 0.0;
    prev_contact_[static_cast<size_t>(f)] = c;
  }
  double height_rel = state_.base_pos.z() - ground_height_under_base();
  double dh = height_rel - rw.base_height_target;
  out.r_gait = r_air + rw.c_torque * tau.squaredNorm() + rw.c_base_height * dh * dh;

  q_prev_ = q_at_entry;
  out.termination = check_termination(state_, ground_height_under_base(), cfg_.min_base_height,
                                      cfg_.max_tilt, state_.nonfoot_contact, cfg_.horizon);
  return out;
}

VecX QuadrupedEnv::actor_observation() const {
  return build_actor_observation(state_, command_, q_prev_);
}

VecX QuadrupedEnv::critic_observation() const {
  return build_critic_observation(actor_observation(), state_);
}

FrameRecord QuadrupedEnv::frame() const {
  FrameRecord f;
  f.base_pos = state_.base_pos;
  f.base_quat = Vec4(state_.base_quat.w(), state_.base_quat.x(), state_.base_quat.y(),
                     state_.base_quat.z());
  f.lin_vel = state_.base_lin_vel_world();
  f.ang_vel = state_.base_ang_vel_world();
  f.normal = state_.base_quat * Vec3::UnitZ();
  f.height = state_.base_pos.z() - ground_height_under_base();
  f.q = state_.q;
  f.qd = state_.qd;
  return f;
}

}  // namespace solo9
