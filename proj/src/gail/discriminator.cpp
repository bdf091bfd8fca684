#include "solo9/gail/discriminator.hpp"

#include <cmath>

namespace solo9 {

Discriminator::Discriminator(int obs_dim, const DiscriminatorConfig& cfg, Rng& rng)
    : obs_dim_(obs_dim),
      cfg_(cfg),
      net_(Mlp::make(obs_dim * cfg.window, cfg.hidden, 1, Activation::tanh_act, rng)),
      normalizer_(obs_dim * cfg.window),
      adam_(AdamState::init(net_)) {
  hyper_.lr = 1e-3;
}

double Discriminator::value(const Eigen::Ref<const VecX>& window_flat) const {
  MatX x = normalizer_.normalize_cols(MatX(window_flat));
  return forward(net_, x)(0, 0);
}

VecX Discriminator::value_batch(const MatX& windows) const {
  return forward(net_, normalizer_.normalize_cols(windows)).row(0).transpose();
}

double Discriminator::imitation_reward(const Eigen::Ref<const VecX>& window_flat) const {
  double d = value(window_flat);
  if (cfg_.reward_map == ImitationRewardMap::lsgan_bounded) {
    double r = 1.0 - 0.25 * (d - 1.0) * (d - 1.0);
    return std::max(0.0, r);
  }
  double sig = 1.0 / (1.0 + std::exp(-d));
  return -std::log(std::max(1.0 - sig, 1e-4));
}

Discriminator::LossInfo Discriminator::loss_and_grads(const MatX& expert, const MatX& policy,
                                                      Grads& grads) const {
  if (expert.cols() == 0 || policy.cols() == 0)
    throw ValidationError("discriminator batch needs expert and policy samples");
  LossInfo info;
  MatX xe = normalizer_.normalize_cols(expert);
  MatX xp = normalizer_.normalize_cols(policy);

  Tape tape_e, tape_p;
  MatX de = forward(net_, xe, &tape_e);
  MatX dp = forward(net_, xp, &tape_p);
  const double ne = static_cast<double>(xe.cols());
  const double np = static_cast<double>(xp.cols());

  info.expert_term = (de.array() - 1.0).square().sum() / ne;
  info.policy_term = (dp.array() + 1.0).square().sum() / np;

  MatX dy_e = 2.0 * (de.array() - 1.0).matrix() / ne;
  MatX dy_p = 2.0 * (dp.array() + 1.0).matrix() / np;
  grads = backward(net_, tape_e, dy_e);
  Grads gp_grads = backward(net_, tape_p, dy_p);
  grads.add_scaled(gp_grads, 1.0);

  if (cfg_.lambda_gp != 0.0) {
    Grads pen;
    info.gp_term = gradient_penalty(net_, xe, pen);
    grads.add_scaled(pen, cfg_.lambda_gp);
  }
  info.total = info.expert_term + info.policy_term + cfg_.lambda_gp * info.gp_term;
  return info;
}

Discriminator::LossInfo Discriminator::update(const MatX& expert, const MatX& policy) {
  MatX combined(expert.rows(), expert.cols() + policy.cols());
  combined << expert, policy;
  normalizer_.update(combined);
  Grads grads;
  LossInfo info = loss_and_grads(expert, policy, grads);
  adam_step(net_, grads, adam_, hyper_);
  return info;
}

double Discriminator::mean_input_gradient_norm(const MatX& windows) const {
  MatX g = input_gradient(net_, normalizer_.normalize_cols(windows));
  double sum = 0.0;
  for (int c = 0; c < g.cols(); ++c) sum += g.col(c).norm();
  return sum / static_cast<double>(g.cols());
}

void WindowReplay::push(const VecX& window) {
  buffer_.push_back(window);
  if (buffer_.size() > capacity_) buffer_.pop_front();
}

MatX WindowReplay::sample(int n, Rng& rng) const {
  if (buffer_.empty()) throw ValidationError("window replay is empty");
  MatX out(buffer_.front().size(), n);
  for (int i = 0; i < n; ++i)
    out.col(i) = buffer_[static_cast<size_t>(rng.uniform_int(0, static_cast<int>(buffer_.size()) - 1))];
  return out;
}

}  // namespace solo9
