#pragma once

#include <memory>

#include "solo9/core/rng.hpp"
#include "solo9/physics/world.hpp"
#include "solo9/rl/vec_env.hpp"

namespace solo9 {

/// 1-dof torque-limited rod on a fixed base, stabilized upright. Small,
/// fast sanity fixture for the optimizer: observation [cos q, sin q, qd],
/// one direct-torque action, reward exp(-err^2) with a small control cost.
class PendulumVecEnv : public VecEnv {
 public:
  PendulumVecEnv(int n_envs, uint64_t seed);

  int num_envs() const override { return static_cast<int>(envs_.size()); }
  int actor_dim() const override { return 3; }
  int critic_dim() const override { return 3; }
  int action_dim() const override { return 1; }

  void reset_all() override;
  void observe(MatX& actor_obs, MatX& critic_obs) const override;
  void step(const MatX& actions, StepOut& out) override;

  /// Mean return of episodes completed since the last call.
  double drain_episode_returns();

 private:
  struct Env {
    std::unique_ptr<World> world;
    SimState state;
    double ret = 0.0;
    int steps = 0;
  };
  void reset_env(int i);
  VecX obs_of(int i) const;

  std::vector<Env> envs_;
  Rng rng_;
  double torque_limit_ = 1.2;
  int horizon_steps_ = 200;  // 4 s at 50 Hz
  std::vector<double> finished_returns_;
};

}  // namespace solo9
