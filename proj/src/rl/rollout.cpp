#include "solo9/rl/rollout.hpp"

#include "solo9/env/rewards.hpp"

namespace solo9 {

RolloutBuffer collect_rollouts(const PolicyNet& policy, VecEnv& env, const Discriminator* disc,
                               WindowReplay* replay, const CollectSettings& settings, Rng& rng) {
  const int n = env.num_envs();
  const int steps = settings.steps;
  const int adim = env.action_dim();

  RolloutBuffer buf;
  buf.steps = steps;
  buf.envs = n;
  buf.actor_obs = MatX(env.actor_dim(), steps * n);
  buf.critic_obs = MatX(env.critic_dim(), steps * n);
  buf.actions = MatX(adim, steps * n);
  buf.logp = VecX::Zero(steps * n);
  buf.value = VecX::Zero(steps * n);
  buf.reward = VecX::Zero(steps * n);
  buf.r_imitation = VecX::Zero(steps * n);
  buf.r_gait = VecX::Zero(steps * n);
  buf.r_constraint = VecX::Zero(steps * n);
  buf.r_turn = VecX::Zero(steps * n);
  buf.done.assign(static_cast<size_t>(steps * n), 0);
  buf.valid.assign(static_cast<size_t>(steps * n), 1);

  MatX aobs(env.actor_dim(), n), cobs(env.critic_dim(), n);
  env.observe(aobs, cobs);

  const int dd = env.disc_dim();
  const bool imitate = disc != nullptr && dd > 0;
  std::vector<VecX> windows;
  auto seed_window = [&](VecX& w, const Eigen::Ref<const VecX>& frame) {
    for (int t = 0; t < disc->window(); ++t) w.segment(t * dd, dd) = frame;
  };
  MatX dcur;
  if (imitate) {
    dcur = MatX(dd, n);
    env.observe_disc(dcur);
    windows.assign(static_cast<size_t>(n), VecX::Zero(dd * disc->window()));
    for (int e = 0; e < n; ++e) seed_window(windows[static_cast<size_t>(e)], dcur.col(e));
  }

  VecX sigma;
  VecEnv::StepOut out;
  for (int t = 0; t < steps; ++t) {
    MatX mu = forward(policy.actor, aobs);
    MatX actions = mu;
    if (!settings.deterministic) {
      sigma = policy.clamped_log_std().array().exp().matrix();
      for (int e = 0; e < n; ++e)
        for (int j = 0; j < adim; ++j) actions(j, e) += sigma[j] * rng.normal();
    }
    VecX logp = policy.log_prob(mu, actions);
    VecX value = forward(policy.critic, cobs).row(0).transpose();

    env.step(actions, out);

    for (int e = 0; e < n; ++e) {
      const int i = buf.idx(t, e);
      buf.actor_obs.col(i) = aobs.col(e);
      buf.critic_obs.col(i) = cobs.col(e);
      buf.actions.col(i) = actions.col(e);
      buf.logp[i] = logp[e];
      buf.value[i] = value[e];

      double r_im = 0.0;
      if (imitate) {
        VecX& w = windows[static_cast<size_t>(e)];
        const int tail = dd * (disc->window() - 1);
        w.head(tail) = VecX(w.tail(tail));
        w.tail(dd) = out.disc_obs.col(e);
        r_im = disc->imitation_reward(w);
        if (replay) replay->push(w);
      }
      buf.r_imitation[i] = r_im;
      buf.r_gait[i] = out.r_gait[e];
      buf.r_constraint[i] = out.r_constraint[e];
      buf.r_turn[i] = out.r_turn[e];
      buf.reward[i] = total_reward(r_im, out.r_gait[e], out.r_constraint[e], out.r_turn[e],
                                   imitate ? settings.w_imitation : 0.0);
      buf.done[static_cast<size_t>(i)] = out.done[static_cast<size_t>(e)];
      buf.valid[static_cast<size_t>(i)] = out.sim_error[static_cast<size_t>(e)] ? 0 : 1;
    }

    if (imitate) {
      bool any_done = false;
      for (int e = 0; e < n; ++e) any_done |= out.done[static_cast<size_t>(e)] != 0;
      if (any_done) {
        env.observe_disc(dcur);  // post-reset features
        for (int e = 0; e < n; ++e)
          if (out.done[static_cast<size_t>(e)])
            seed_window(windows[static_cast<size_t>(e)], dcur.col(e));
      }
    }

    aobs = out.actor_obs;
    cobs = out.critic_obs;
  }

  buf.bootstrap_value = forward(policy.critic, cobs).row(0).transpose();
  return buf;
}

void compute_advantages(RolloutBuffer& buf, double gamma, double lam, bool normalize) {
  buf.advantages = VecX::Zero(buf.size());
  buf.returns = VecX::Zero(buf.size());
  VecX running = VecX::Zero(buf.envs);
  for (int t = buf.steps - 1; t >= 0; --t) {
    for (int e = 0; e < buf.envs; ++e) {
      const int i = buf.idx(t, e);
      if (!buf.valid[static_cast<size_t>(i)]) {
        running[e] = 0.0;
        buf.advantages[i] = 0.0;
        buf.returns[i] = buf.value[i];
        continue;
      }
      double nonterminal = buf.done[static_cast<size_t>(i)] ? 0.0 : 1.0;
      double next_value =
          t == buf.steps - 1 ? buf.bootstrap_value[e] : buf.value[buf.idx(t + 1, e)];
      double delta = buf.reward[i] + gamma * next_value * nonterminal - buf.value[i];
      running[e] = delta + gamma * lam * nonterminal * running[e];
      buf.advantages[i] = running[e];
      buf.returns[i] = running[e] + buf.value[i];
    }
  }
  if (normalize) {
    double mean = 0.0, count = 0.0;
    for (int i = 0; i < buf.size(); ++i)
      if (buf.valid[static_cast<size_t>(i)]) {
        mean += buf.advantages[i];
        count += 1.0;
      }
    if (count < 1) return;
    mean /= count;
    double var = 0.0;
    for (int i = 0; i < buf.size(); ++i)
      if (buf.valid[static_cast<size_t>(i)]) {
        double d = buf.advantages[i] - mean;
        var += d * d;
      }
    double std = std::sqrt(var / count) + 1e-8;
    for (int i = 0; i < buf.size(); ++i)
      if (buf.valid[static_cast<size_t>(i)]) buf.advantages[i] = (buf.advantages[i] - mean) / std;
  }
}

}  // namespace solo9
