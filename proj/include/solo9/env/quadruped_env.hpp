#pragma once

#include <optional>

#include "solo9/core/config.hpp"
#include "solo9/dataset/motion_dataset.hpp"
#include "solo9/env/curriculum.hpp"
#include "solo9/env/randomization.hpp"
#include "solo9/env/rewards.hpp"
#include "solo9/physics/world.hpp"

namespace solo9 {

enum class ActionMode { pd_target, direct_torque };
enum class Termination { alive, fallen, timeout };

struct EnvConfig {
  // [sim]
  double control_hz = 50.0;
  int substeps = 5;
  WorldParams world;
  // [rewards]
  RewardWeights rewards;
  // [randomization]
  bool randomize = true;
  RandomizationRanges ranges;
  // [curriculum]
  bool curriculum = false;
  int max_level = 5;
  double walk_target = 1.5;    // m per episode
  double pd_easy_scale = 1.5;  // level-0 gain multiplier, decays to 1 at max level
  TerrainKind terrain_kind = TerrainKind::flat;
  TerrainParams terrain;
  // [termination]
  double min_base_height = 0.08;
  double max_tilt = 1.2;  // rad, roll or pitch
  double horizon = 15.0;  // s
  // [action]
  ActionMode action_mode = ActionMode::pd_target;
  double kp = 4.0;
  double kd = 0.2;
  double action_scale = 0.5;  // rad per unit action in pd_target mode

  double control_dt() const { return 1.0 / control_hz; }
  double substep_dt() const { return control_dt() / substeps; }

  static EnvConfig from_config(const Config& cfg);
};

/// Torque computation for both actuation modes, clamped to joint limits.
VecX apply_action(const Eigen::Ref<const VecX>& action, ActionMode mode, double kp, double kd,
                  double scale, const VecX& default_q, const VecX& q, const VecX& qd,
                  const std::vector<double>& torque_limits);

/// PD target vector for the given action (used for the action-rate penalty).
VecX action_target(const Eigen::Ref<const VecX>& action, ActionMode mode, double scale,
                   const VecX& default_q, const std::vector<double>& torque_limits);

/// Actor observation: base quaternion (4, w x y z), commands (2), q, qd,
/// previous-step q. 33 dims for 9 joints, 30 for 8.
VecX build_actor_observation(const SimState& state, const Vec2& command, const VecX& q_prev);
/// Critic observation: the actor observation with the body-frame base linear
/// velocity appended (36 dims for 9 joints). The shared prefix is bit-equal.
VecX build_critic_observation(const VecX& actor_obs, const SimState& state);

Termination check_termination(const SimState& state, double ground_height, double min_height,
                              double max_tilt, bool nonfoot_contact, double horizon);

/// One command-conditioned locomotion episode generator: randomization,
/// curriculum, rewards, termination and reset in one place. Each instance
/// owns its world and state; instances never share mutable data.
class QuadrupedEnv {
 public:
  QuadrupedEnv(const RobotSpec& spec, const EnvConfig& cfg, uint64_t seed);

  /// solo9_free ablation: the waist stays a free joint but receives zero
  /// torque.
  void set_waist_unpowered(bool on) { waist_unpowered_ = on; }
  /// Overrides command sampling (evaluation protocols).
  void set_fixed_command(std::optional<Vec2> cmd) { fixed_command_ = cmd; }
  /// Random-direction base velocity kick of this magnitude applied at every
  /// control step (disturbance protocols).
  void set_push_magnitude(double mag) { push_magnitude_ = mag; }
  /// Replaces the training terrain (evaluation protocols).
  void set_eval_terrain(std::optional<Terrain> t) { eval_terrain_ = std::move(t); }
  /// Narrows the command sampling ranges (takes effect at the next reset).
  void set_command_ranges(const Vec2& lin, const Vec2& ang) {
    cfg_.ranges.lin_vel_cmd = lin;
    cfg_.ranges.ang_vel_cmd = ang;
  }

  void reset();

  struct StepResult {
    double r_gait = 0.0;
    double r_constraint = 0.0;
    double r_turn = 0.0;
    Termination termination = Termination::alive;
    bool sim_error = false;
  };
  StepResult step(const VecX& action);

  VecX actor_observation() const;
  VecX critic_observation() const;
  FrameRecord frame() const;

  const SimState& state() const { return state_; }
  World& world() { return world_; }
  const EnvConfig& config() const { return cfg_; }
  Vec2 command() const { return command_; }
  int nq() const { return world_.model().nq(); }
  int actor_dim() const { return 6 + 3 * nq(); }
  int critic_dim() const { return actor_dim() + 3; }
  double episode_time() const { return state_.time - episode_start_time_; }
  double walked_distance() const;
  const CurriculumState& curriculum_state() const { return curriculum_; }
  const VecX& last_torques() const { return last_torques_; }
  const EnvOverrides& overrides() const { return overrides_; }

 private:
  double ground_height_under_base() const;
  void place_at_rest_pose(double angle_mult);

  RobotSpec spec_;
  EnvConfig cfg_;
  World world_;
  Model pristine_model_;
  double base_friction_;
  std::vector<int> trunk_links_;
  int waist_dof_ = -1;

  SimState state_;
  Rng rng_;
  uint64_t episode_counter_ = 0;
  Rng push_rng_;
  Vec2 command_ = Vec2::Zero();
  std::optional<Vec2> fixed_command_;
  double push_magnitude_ = 0.0;
  std::optional<Terrain> eval_terrain_;
  bool waist_unpowered_ = false;
  EnvOverrides overrides_;

  CurriculumState curriculum_;
  VecX q_prev_;
  VecX prev_target_;
  VecX last_torques_;
  Vec4 air_time_ = Vec4::Zero();
  std::array<bool, 4> prev_contact_{};
  Vec2 spawn_xy_ = Vec2::Zero();
  double episode_start_time_ = 0.0;
};

}  // namespace solo9
