#include "solo9/rl/ppo.hpp"

#include <algorithm>
#include <numeric>

namespace solo9 {

PpoMetrics ppo_update(PolicyNet& policy, const RolloutBuffer& buf, PpoHyper& hyper,
                      PpoOptState& opt, Rng& rng) {
  if (buf.advantages.size() != buf.size())
    throw ValidationError("compute_advantages must run before ppo_update");

  std::vector<int> order;
  order.reserve(static_cast<size_t>(buf.size()));
  for (int i = 0; i < buf.size(); ++i)
    if (buf.valid[static_cast<size_t>(i)]) order.push_back(i);
  if (order.empty()) throw ValidationError("rollout buffer has no valid transitions");

  // Snapshot for restore-on-abort.
  PolicyNet backup = policy;
  PpoOptState opt_backup = opt;

  PpoMetrics metrics;
  metrics.lr = hyper.lr;
  const int adim = policy.action_dim();
  AdamHyper ah;
  ah.lr = hyper.lr;

  double last_kl = 0.0;
  bool failed = false;
  for (int epoch = 0; epoch < hyper.epochs && !failed; ++epoch) {
    // Deterministic shuffle.
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
      std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(rng.uniform_int(0, i))]);
    const int mb_count = std::max(1, hyper.minibatches);
    const int mb_size = std::max(1, static_cast<int>(order.size()) / mb_count);

    double kl_sum = 0.0, clip_sum = 0.0, surr_sum = 0.0, vloss_sum = 0.0;
    long seen = 0;
    for (int mb = 0; mb < mb_count; ++mb) {
      const int begin = mb * mb_size;
      const int end = mb == mb_count - 1 ? static_cast<int>(order.size()) : begin + mb_size;
      const int m = end - begin;
      if (m <= 0) continue;

      MatX aobs(buf.actor_obs.rows(), m), cobs(buf.critic_obs.rows(), m), acts(adim, m);
      VecX logp_old(m), adv(m), ret(m);
      for (int k = 0; k < m; ++k) {
        int i = order[static_cast<size_t>(begin + k)];
        aobs.col(k) = buf.actor_obs.col(i);
        cobs.col(k) = buf.critic_obs.col(i);
        acts.col(k) = buf.actions.col(i);
        logp_old[k] = buf.logp[i];
        adv[k] = buf.advantages[i];
        ret[k] = buf.returns[i];
      }

      Tape actor_tape, critic_tape;
      MatX mu = forward(policy.actor, aobs, &actor_tape);
      VecX logp_new = policy.log_prob(mu, acts);
      VecX values = forward(policy.critic, cobs, &critic_tape).row(0).transpose();

      VecX ls = policy.clamped_log_std();
      VecX inv_var = (-2.0 * ls.array()).exp().matrix();

      MatX dmu = MatX::Zero(adim, m);
      VecX dls = VecX::Zero(adim);
      double surr = 0.0, kl = 0.0;
      int clipped = 0;
      for (int k = 0; k < m; ++k) {
        double ratio = std::exp(logp_new[k] - logp_old[k]);
        double unclipped = ratio * adv[k];
        double rclip = std::clamp(ratio, 1.0 - hyper.clip, 1.0 + hyper.clip);
        double clipped_obj = rclip * adv[k];
        surr += std::min(unclipped, clipped_obj);
        bool clip_active = (ratio > 1.0 + hyper.clip && adv[k] > 0) ||
                           (ratio < 1.0 - hyper.clip && adv[k] < 0);
        if (clip_active) ++clipped;
        kl += logp_old[k] - logp_new[k];
        if (!clip_active) {
          // d(-obj)/d logp_new = -adv * ratio; chain into mu and log_std.
          double dlogp = -adv[k] * ratio / m;
          VecX diff = acts.col(k) - mu.col(k);
          dmu.col(k) = dlogp * diff.cwiseProduct(inv_var);
          dls += dlogp * (diff.cwiseProduct(diff).cwiseProduct(inv_var) -
                          VecX::Ones(adim));
        }
      }
      surr /= m;
      kl /= m;
      kl_sum += kl * m;
      clip_sum += clipped;
      surr_sum += surr * m;
      seen += m;

      // Entropy bonus: d(-c_e * H)/d log_std = -c_e per dimension.
      dls.array() -= hyper.entropy_coef;

      VecX dv = (values - ret) * (hyper.value_coef / m);
      double vloss = 0.5 * (values - ret).squaredNorm() / m;
      vloss_sum += vloss * m;

      if (!std::isfinite(surr) || !std::isfinite(vloss) || !std::isfinite(kl)) {
        failed = true;
        break;
      }

      try {
        Grads ga = backward(policy.actor, actor_tape, dmu);
        Grads gc = backward(policy.critic, critic_tape, MatX(dv.transpose()));
        ah.lr = hyper.lr;
        adam_step(policy.actor, ga, opt.actor, ah);
        adam_step(policy.critic, gc, opt.critic, ah);
        adam_step(policy.log_std, dls, opt.log_std, ah);
        policy.log_std =
            policy.log_std.cwiseMax(policy.log_std_min).cwiseMin(policy.log_std_max);
      } catch (const ValidationError&) {
        failed = true;
        break;
      }
      if (!policy.actor.finite() || !policy.critic.finite()) {
        failed = true;
        break;
      }
    }
    if (seen > 0) {
      last_kl = kl_sum / static_cast<double>(seen);
      metrics.surrogate = surr_sum / static_cast<double>(seen);
      metrics.value_loss = vloss_sum / static_cast<double>(seen);
      metrics.clip_fraction = clip_sum / static_cast<double>(seen);
    }
  }

  if (failed) {
    policy = backup;
    opt = opt_backup;
    metrics.aborted = true;
    return metrics;
  }

  metrics.kl = last_kl;
  metrics.entropy = policy.entropy();
  if (hyper.adaptive_lr) {
    if (last_kl > 2.0 * hyper.kl_target)
      hyper.lr = std::max(1e-6, hyper.lr / 1.5);
    else if (last_kl < 0.5 * hyper.kl_target && !metrics.aborted)
      hyper.lr = std::min(1e-2, hyper.lr * 1.5);
  }
  metrics.lr = hyper.lr;
  return metrics;
}

}  // namespace solo9
