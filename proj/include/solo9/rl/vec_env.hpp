#pragma once

#include <vector>

#include "solo9/core/types.hpp"

namespace solo9 {

/// Batch-of-environments interface consumed by the rollout collector.
/// Implementations auto-reset finished or errored environments inside step()
/// and report post-step (or post-reset) observations.
class VecEnv {
 public:
  virtual ~VecEnv() = default;

  virtual int num_envs() const = 0;
  virtual int actor_dim() const = 0;
  virtual int critic_dim() const = 0;
  virtual int action_dim() const = 0;
  /// Dimension of the per-step discriminator feature, 0 when the task has no
  /// imitation signal.
  virtual int disc_dim() const { return 0; }

  struct StepOut {
    MatX actor_obs;   // actor_dim x n
    MatX critic_obs;  // critic_dim x n
    VecX r_gait, r_constraint, r_turn;
    MatX disc_obs;    // disc_dim x n (unused when disc_dim() == 0)
    std::vector<uint8_t> done;
    std::vector<uint8_t> fell;       // done via fall (vs timeout)
    std::vector<uint8_t> sim_error;  // transition must be masked out
  };

  virtual void reset_all() = 0;
  virtual void observe(MatX& actor_obs, MatX& critic_obs) const = 0;
  /// Discriminator features of the CURRENT state (used to seed windows).
  virtual void observe_disc(MatX& disc_obs) const { (void)disc_obs; }
  virtual void step(const MatX& actions, StepOut& out) = 0;
};

}  // namespace solo9
