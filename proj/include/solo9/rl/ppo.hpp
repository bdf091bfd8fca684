#pragma once

#include "solo9/rl/rollout.hpp"

namespace solo9 {

struct PpoHyper {
  double gamma = 0.99;
  double lam = 0.95;
  double clip = 0.2;
  int epochs = 5;
  int minibatches = 4;
  double lr = 3e-4;
  double entropy_coef = 0.003;
  double value_coef = 0.5;
  double kl_target = 0.015;
  bool adaptive_lr = true;
};

struct PpoOptState {
  AdamState actor;
  AdamState critic;
  AdamVecState log_std;

  static PpoOptState init(const PolicyNet& p) {
    return {AdamState::init(p.actor), AdamState::init(p.critic),
            AdamVecState::init(static_cast<int>(p.log_std.size()))};
  }
};

struct PpoMetrics {
  double surrogate = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double kl = 0.0;  // mean(logp_old - logp_new) after the update
  double clip_fraction = 0.0;
  double lr = 0.0;
  bool aborted = false;  // non-finite loss; parameters were restored
};

/// Clipped-surrogate update with value loss on the privileged critic
/// observations, entropy bonus, minibatched epochs and adaptive-KL learning
/// rate backoff. Advantages must have been computed on the buffer.
PpoMetrics ppo_update(PolicyNet& policy, const RolloutBuffer& buffer, PpoHyper& hyper,
                      PpoOptState& opt, Rng& rng);

}  // namespace solo9
