#include "solo9/coopt/trainer.hpp"

#include <cmath>

namespace solo9 {

TrainerConfig TrainerConfig::from_config(const Config& cfg) {
  TrainerConfig t;
  t.n_envs = cfg.get_int("training", "n_envs", t.n_envs);
  t.steps_per_update = cfg.get_int("training", "steps_per_update", t.steps_per_update);
  if (cfg.has("training", "policy_hidden")) {
    VecX h = cfg.get_vector("training", "policy_hidden");
    t.policy_hidden.clear();
    for (int i = 0; i < h.size(); ++i) t.policy_hidden.push_back(static_cast<int>(h[i]));
  }
  t.ppo.gamma = cfg.get_double("ppo", "gamma", t.ppo.gamma);
  t.ppo.lam = cfg.get_double("ppo", "lambda", t.ppo.lam);
  t.ppo.clip = cfg.get_double("ppo", "clip", t.ppo.clip);
  t.ppo.epochs = cfg.get_int("ppo", "epochs", t.ppo.epochs);
  t.ppo.minibatches = cfg.get_int("ppo", "minibatches", t.ppo.minibatches);
  t.ppo.lr = cfg.get_double("ppo", "lr", t.ppo.lr);
  t.ppo.entropy_coef = cfg.get_double("ppo", "entropy_coef", t.ppo.entropy_coef);
  t.ppo.value_coef = cfg.get_double("ppo", "value_coef", t.ppo.value_coef);
  t.ppo.kl_target = cfg.get_double("ppo", "kl_target", t.ppo.kl_target);
  t.ppo.adaptive_lr = cfg.get_bool("ppo", "adaptive_lr", t.ppo.adaptive_lr);

  t.disc.window = cfg.get_int("discriminator", "window", t.disc.window);
  t.disc.lambda_gp = cfg.get_double("discriminator", "lambda_gp", t.disc.lambda_gp);
  if (cfg.has("discriminator", "hidden")) {
    VecX h = cfg.get_vector("discriminator", "hidden");
    t.disc.hidden.clear();
    for (int i = 0; i < h.size(); ++i) t.disc.hidden.push_back(static_cast<int>(h[i]));
  }
  std::string map = cfg.get_string("discriminator", "reward_map", "lsgan_bounded");
  if (map == "lsgan_bounded") t.disc.reward_map = ImitationRewardMap::lsgan_bounded;
  else if (map == "classic_gail") t.disc.reward_map = ImitationRewardMap::classic_gail;
  else throw ValidationError("unknown reward map '" + map + "'");
  t.disc_batch = cfg.get_int("discriminator", "batch", t.disc_batch);
  t.disc_steps_per_update =
      cfg.get_int("discriminator", "steps_per_update", t.disc_steps_per_update);
  t.replay_capacity = static_cast<size_t>(
      cfg.get_double("discriminator", "replay_capacity", static_cast<double>(t.replay_capacity)));
  return t;
}

MetricsLog::MetricsLog(const std::string& path) : path_(path) {
  if (!path.empty()) {
    out_ = std::make_unique<std::ofstream>(path, std::ios::app);
    if (!*out_) throw ValidationError("cannot open metrics log '" + path + "'");
  }
}

void MetricsLog::row(const std::vector<std::pair<std::string, double>>& values) {
  if (!out_) return;
  if (!header_written_) {
    for (size_t i = 0; i < values.size(); ++i)
      *out_ << (i ? "\t" : "") << values[i].first;
    *out_ << "\n";
    header_written_ = true;
  }
  out_->precision(10);
  for (size_t i = 0; i < values.size(); ++i) *out_ << (i ? "\t" : "") << values[i].second;
  *out_ << "\n";
  out_->flush();
}

Trainer::Trainer(const RobotSpec& spec, const EnvConfig& env_cfg, const TrainerConfig& cfg,
                 uint64_t seed, const std::string& metrics_path)
    : spec_(spec),
      env_cfg_(env_cfg),
      cfg_(cfg),
      rng_(seed),
      replay_(cfg.replay_capacity),
      metrics_(metrics_path) {
  venv_ = std::make_unique<QuadrupedVecEnv>(spec, env_cfg, cfg.n_envs, seed ^ 0xE5151ull);
  Rng net_rng = rng_.fork(1);
  policy_ = PolicyNet::make(venv_->actor_dim(), venv_->critic_dim(), venv_->action_dim(),
                            cfg.policy_hidden, net_rng);
  opt_ = PpoOptState::init(policy_);
  Rng disc_rng = rng_.fork(2);
  disc_ = std::make_unique<Discriminator>(kDiscriminatorObsDim, cfg.disc, disc_rng);
  window_seed_ = seed ^ 0x5EEDull;
}

void Trainer::set_dataset(MotionDataset ds) {
  ds.validate();
  if (ds.meta.dof != 9)
    throw ValidationError("training dataset must be 9-dof (zero-waist augment first)");
  dataset_ = std::move(ds);
}

void Trainer::set_gait_allowlist(const std::vector<std::string>& labels) {
  allowlist_ = labels;
}

void Trainer::set_command_ranges(const Vec2& lin, const Vec2& ang) {
  env_cfg_.ranges.lin_vel_cmd = lin;
  env_cfg_.ranges.ang_vel_cmd = ang;
  for (int i = 0; i < venv_->num_envs(); ++i)
    venv_->env(i).set_command_ranges(lin, ang);
}

MotionDataset Trainer::sampling_dataset() const {
  if (allowlist_.empty()) return dataset_;
  MotionDataset out;
  out.meta = dataset_.meta;
  for (const auto& clip : dataset_.clips)
    for (const auto& label : allowlist_)
      if (clip.label == label) out.clips.push_back(clip);
  if (out.clips.empty())
    throw ValidationError("gait allowlist matches no clips in the dataset");
  return out;
}

Trainer::UpdateStats Trainer::update(double w_imitation) {
  if (dataset_.clips.empty()) throw ValidationError("trainer has no reference dataset");
  CollectSettings cs;
  cs.steps = cfg_.steps_per_update;
  cs.w_imitation = w_imitation;
  RolloutBuffer buf = collect_rollouts(policy_, *venv_, disc_.get(), &replay_, cs, rng_);

  UpdateStats stats;
  MotionDataset expert_src = sampling_dataset();
  for (int k = 0; k < cfg_.disc_steps_per_update; ++k) {
    MatX expert = sample_windows(expert_src, cfg_.disc_batch, cfg_.disc.window, window_seed_++);
    MatX policy_batch = replay_.sample(cfg_.disc_batch, rng_);
    stats.disc = disc_->update(expert, policy_batch);
  }

  compute_advantages(buf, cfg_.ppo.gamma, cfg_.ppo.lam);
  stats.ppo = ppo_update(policy_, buf, cfg_.ppo, opt_, rng_);

  stats.mean_r_imitation = buf.r_imitation.mean();
  stats.mean_r_task = (buf.r_gait + buf.r_constraint + buf.r_turn).mean();
  stats.mean_reward = buf.reward.mean();
  ++updates_done_;

  metrics_.row({{"update", static_cast<double>(updates_done_)},
                {"w_imitation", w_imitation},
                {"r_imitation", stats.mean_r_imitation},
                {"r_gait", buf.r_gait.mean()},
                {"r_constraint", buf.r_constraint.mean()},
                {"r_turn", buf.r_turn.mean()},
                {"reward", stats.mean_reward},
                {"surrogate", stats.ppo.surrogate},
                {"value_loss", stats.ppo.value_loss},
                {"entropy", stats.ppo.entropy},
                {"kl", stats.ppo.kl},
                {"clip_fraction", stats.ppo.clip_fraction},
                {"lr", stats.ppo.lr},
                {"disc_loss", stats.disc.total},
                {"disc_gp", stats.disc.gp_term},
                {"terrain_level", venv_->mean_terrain_level()},
                {"survival", venv_->survival_rate()}});
  return stats;
}

void Trainer::train(int updates, double w_imitation) {
  for (int u = 0; u < updates; ++u) update(w_imitation);
}

std::vector<Trainer::ExportedEpisode> Trainer::export_episodes(int n, double horizon_s) {
  std::vector<ExportedEpisode> out;
  EnvConfig cfg = env_cfg_;
  cfg.horizon = horizon_s;
  QuadrupedEnv env(spec_, cfg, rng_.next_u64());
  const int steps = static_cast<int>(horizon_s * cfg.control_hz);
  for (int e = 0; e < n; ++e) {
    env.reset();
    ExportedEpisode ep;
    ep.log.frames.push_back(env.frame());
    bool fell = false;
    double rim_sum = 0.0;
    VecX window = VecX::Zero(disc_->input_dim());
    VecX first = extract_discriminator_obs(env.frame());
    for (int t = 0; t < disc_->window(); ++t)
      window.segment(t * kDiscriminatorObsDim, kDiscriminatorObsDim) = first;
    double track_sum = 0.0;
    int t = 0;
    for (; t < steps; ++t) {
      MatX obs(env.actor_dim(), 1);
      obs.col(0) = env.actor_observation();
      MatX mu = forward(policy_.actor, obs);
      QuadrupedEnv::StepResult r = env.step(mu.col(0));
      ep.log.frames.push_back(env.frame());
      const int tail = kDiscriminatorObsDim * (disc_->window() - 1);
      window.head(tail) = VecX(window.tail(tail));
      window.tail(kDiscriminatorObsDim) = extract_discriminator_obs(env.frame());
      rim_sum += disc_->imitation_reward(window);
      track_sum += std::abs(env.command().y() - env.state().base_ang_vel_world().z());
      if (r.sim_error || r.termination == Termination::fallen) {
        fell = true;
        break;
      }
      if (r.termination == Termination::timeout) break;
    }
    ep.log.fell = fell;
    ep.log.tracking_error = t > 0 ? track_sum / t : 1e9;
    ep.mean_imitation_reward = t > 0 ? rim_sum / t : 0.0;
    out.push_back(std::move(ep));
  }
  return out;
}

void Trainer::save_checkpoint(const std::string& path) const {
  CheckpointWriter w(path);
  w.put_i64("updates", updates_done_);
  policy_.save(w, "policy");
  w.put_mlp("disc.net", disc_->net());
  w.put_normalizer("disc.norm", disc_->normalizer());
  w.put_adam("opt.actor", opt_.actor);
  w.put_adam("opt.critic", opt_.critic);
  w.put_adam_vec("opt.log_std", opt_.log_std);
  w.put_adam("opt.disc", disc_->optimizer_state());
  w.put_f64("ppo.lr", cfg_.ppo.lr);
}

void Trainer::load_checkpoint(const std::string& path) {
  CheckpointReader r(path);
  updates_done_ = r.get_i64("updates");
  policy_ = PolicyNet::load(r, "policy");
  disc_->net() = r.get_mlp("disc.net");
  disc_->normalizer() = r.get_normalizer("disc.norm");
  opt_.actor = r.get_adam("opt.actor");
  opt_.critic = r.get_adam("opt.critic");
  opt_.log_std = r.get_adam_vec("opt.log_std");
  disc_->optimizer_state() = r.get_adam("opt.disc");
  cfg_.ppo.lr = r.get_f64("ppo.lr");
}

}  // namespace solo9
