#pragma once

#include <memory>

#include "solo9/env/quadruped_env.hpp"
#include "solo9/rl/vec_env.hpp"

namespace solo9 {

/// Batch of independent quadruped envs behind the VecEnv interface.
/// Discriminator features are always emitted in the 9-dof layout: robots
/// with a welded or absent waist get zero waist channels inserted, matching
/// the zero-waist augmentation of the reference data.
class QuadrupedVecEnv : public VecEnv {
 public:
  QuadrupedVecEnv(const RobotSpec& spec, const EnvConfig& cfg, int n_envs, uint64_t seed,
                  int waist_index = 0);

  int num_envs() const override { return static_cast<int>(envs_.size()); }
  int actor_dim() const override { return envs_.front()->actor_dim(); }
  int critic_dim() const override { return envs_.front()->critic_dim(); }
  int action_dim() const override { return envs_.front()->nq(); }
  int disc_dim() const override { return kDiscriminatorObsDim; }

  void reset_all() override;
  void observe(MatX& actor_obs, MatX& critic_obs) const override;
  void observe_disc(MatX& disc_obs) const override;
  void step(const MatX& actions, StepOut& out) override;

  QuadrupedEnv& env(int i) { return *envs_[static_cast<size_t>(i)]; }
  /// Fraction of episodes finished so far that reached the horizon.
  double survival_rate() const;
  double mean_episode_tracking_error() const;
  void clear_episode_stats();
  double mean_terrain_level() const;

 private:
  VecX disc_obs_of(int i) const;

  std::vector<std::unique_ptr<QuadrupedEnv>> envs_;
  int waist_index_ = 0;
  bool pad_waist_ = false;
  // Per-env accumulators for episode stats.
  std::vector<double> track_err_sum_;
  std::vector<int> track_err_count_;
  long episodes_done_ = 0;
  long episodes_survived_ = 0;
  double finished_track_err_sum_ = 0.0;
  long finished_track_err_count_ = 0;
};

}  // namespace solo9
