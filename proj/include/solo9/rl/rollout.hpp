#pragma once

#include "solo9/gail/discriminator.hpp"
#include "solo9/rl/policy.hpp"
#include "solo9/rl/vec_env.hpp"

namespace solo9 {

/// Flat (step-major) on-policy transition storage. Index = step * n_envs + env.
struct RolloutBuffer {
  int steps = 0;
  int envs = 0;
  MatX actor_obs;   // actor_dim x (steps*envs)
  MatX critic_obs;  // critic_dim x (steps*envs)
  MatX actions;     // action_dim x (steps*envs)
  VecX logp;
  VecX value;
  VecX reward;       // mixed total reward
  VecX r_imitation;  // logged per term
  VecX r_gait, r_constraint, r_turn;
  std::vector<uint8_t> done;
  std::vector<uint8_t> valid;  // sim-error transitions are masked out
  VecX bootstrap_value;        // per env, value of the state after the last step
  VecX advantages;
  VecX returns;

  int idx(int step, int env) const { return step * envs + env; }
  int size() const { return steps * envs; }
};

struct CollectSettings {
  int steps = 32;
  double w_imitation = 0.0;  // reward mix; 0 disables the discriminator path
  bool deterministic = false;  // mean actions (evaluation)
};

/// Rolls the policy through the vectorized envs. When a discriminator is
/// given, the imitation reward of each transition is computed from the most
/// recent window of discriminator features (windows reset at episode
/// boundaries, seeded by repeating the reset frame). Policy windows are also
/// pushed into the replay when one is given.
RolloutBuffer collect_rollouts(const PolicyNet& policy, VecEnv& env, const Discriminator* disc,
                               WindowReplay* replay, const CollectSettings& settings, Rng& rng);

/// Standard recursive generalized advantage estimation with episode masking,
/// followed by batch normalization of the advantages (valid entries only).
void compute_advantages(RolloutBuffer& buffer, double gamma, double lam,
                        bool normalize = true);

}  // namespace solo9
