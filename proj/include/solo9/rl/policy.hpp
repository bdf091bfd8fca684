#pragma once

#include "solo9/nn/adam.hpp"
#include "solo9/nn/checkpoint.hpp"

namespace solo9 {

/// Asymmetric actor-critic: the actor sees proprioception only, the critic
/// additionally receives the privileged base linear velocity. The action
/// distribution is a diagonal Gaussian with a state-independent log-std.
struct PolicyNet {
  Mlp actor;
  Mlp critic;
  VecX log_std;
  double log_std_min = -4.0;
  double log_std_max = 1.0;

  static PolicyNet make(int actor_dim, int critic_dim, int action_dim,
                        const std::vector<int>& hidden, Rng& rng, double init_log_std = -0.7) {
    PolicyNet p;
    p.actor = Mlp::make(actor_dim, hidden, action_dim, Activation::tanh_act, rng);
    p.critic = Mlp::make(critic_dim, hidden, 1, Activation::tanh_act, rng, 1.0);
    p.log_std = VecX::Constant(action_dim, init_log_std);
    return p;
  }

  int action_dim() const { return actor.output_dim(); }

  VecX clamped_log_std() const {
    return log_std.cwiseMax(log_std_min).cwiseMin(log_std_max);
  }

  /// Per-column Gaussian log density of `actions` under means `mu`.
  VecX log_prob(const MatX& mu, const MatX& actions) const {
    VecX ls = clamped_log_std();
    VecX inv_var = (-2.0 * ls.array()).exp().matrix();
    VecX out = VecX::Zero(mu.cols());
    const double c = -0.5 * std::log(2.0 * M_PI);
    for (int i = 0; i < mu.cols(); ++i) {
      VecX d = actions.col(i) - mu.col(i);
      out[i] = (c * action_dim()) - ls.sum() - 0.5 * d.cwiseProduct(d).dot(inv_var);
    }
    return out;
  }

  /// Gaussian entropy (state independent).
  double entropy() const {
    return clamped_log_std().sum() + 0.5 * action_dim() * std::log(2.0 * M_PI * M_E);
  }

  void save(CheckpointWriter& w, const std::string& prefix) const {
    w.put_mlp(prefix + ".actor", actor);
    w.put_mlp(prefix + ".critic", critic);
    w.put_vec(prefix + ".log_std", log_std);
  }
  static PolicyNet load(CheckpointReader& r, const std::string& prefix) {
    PolicyNet p;
    p.actor = r.get_mlp(prefix + ".actor");
    p.critic = r.get_mlp(prefix + ".critic");
    p.log_std = r.get_vec(prefix + ".log_std");
    return p;
  }
};

}  // namespace solo9
