#include "solo9/env/quadruped_vec_env.hpp"

namespace solo9 {

QuadrupedVecEnv::QuadrupedVecEnv(const RobotSpec& spec, const EnvConfig& cfg, int n_envs,
                                 uint64_t seed, int waist_index)
    : waist_index_(waist_index) {
  for (int i = 0; i < n_envs; ++i)
    envs_.push_back(std::make_unique<QuadrupedEnv>(spec, cfg, seed + static_cast<uint64_t>(i) * 0x9e37ull));
  pad_waist_ = envs_.front()->nq() == 8;
  track_err_sum_.assign(static_cast<size_t>(n_envs), 0.0);
  track_err_count_.assign(static_cast<size_t>(n_envs), 0);
}

void QuadrupedVecEnv::reset_all() {
  for (auto& e : envs_) e->reset();
  std::fill(track_err_sum_.begin(), track_err_sum_.end(), 0.0);
  std::fill(track_err_count_.begin(), track_err_count_.end(), 0);
}

void QuadrupedVecEnv::observe(MatX& actor_obs, MatX& critic_obs) const {
  actor_obs.resize(actor_dim(), num_envs());
  critic_obs.resize(critic_dim(), num_envs());
  for (int i = 0; i < num_envs(); ++i) {
    actor_obs.col(i) = envs_[static_cast<size_t>(i)]->actor_observation();
    critic_obs.col(i) = envs_[static_cast<size_t>(i)]->critic_observation();
  }
}

VecX QuadrupedVecEnv::disc_obs_of(int i) const {
  FrameRecord f = envs_[static_cast<size_t>(i)]->frame();
  if (pad_waist_) {
    // Welded/absent waist: report the 9-dof layout with zero waist channels.
    VecX q9(9), qd9(9);
    q9.head(waist_index_) = f.q.head(waist_index_);
    q9[waist_index_] = 0.0;
    q9.tail(8 - waist_index_) = f.q.tail(8 - waist_index_);
    qd9.head(waist_index_) = f.qd.head(waist_index_);
    qd9[waist_index_] = 0.0;
    qd9.tail(8 - waist_index_) = f.qd.tail(8 - waist_index_);
    f.q = q9;
    f.qd = qd9;
  }
  return extract_discriminator_obs(f);
}

void QuadrupedVecEnv::observe_disc(MatX& disc_obs) const {
  disc_obs.resize(kDiscriminatorObsDim, num_envs());
  for (int i = 0; i < num_envs(); ++i) disc_obs.col(i) = disc_obs_of(i);
}

void QuadrupedVecEnv::step(const MatX& actions, StepOut& out) {
  const int n = num_envs();
  out.actor_obs.resize(actor_dim(), n);
  out.critic_obs.resize(critic_dim(), n);
  out.disc_obs.resize(kDiscriminatorObsDim, n);
  out.r_gait = VecX::Zero(n);
  out.r_constraint = VecX::Zero(n);
  out.r_turn = VecX::Zero(n);
  out.done.assign(static_cast<size_t>(n), 0);
  out.fell.assign(static_cast<size_t>(n), 0);
  out.sim_error.assign(static_cast<size_t>(n), 0);

  for (int i = 0; i < n; ++i) {
    QuadrupedEnv& env = *envs_[static_cast<size_t>(i)];
    QuadrupedEnv::StepResult r = env.step(actions.col(i));
    out.r_gait[i] = r.r_gait;
    out.r_constraint[i] = r.r_constraint;
    out.r_turn[i] = r.r_turn;
    out.disc_obs.col(i) = disc_obs_of(i);  // pre-reset (terminal) features

    track_err_sum_[static_cast<size_t>(i)] +=
        std::abs(env.command().y() - env.state().base_ang_vel_world().z());
    track_err_count_[static_cast<size_t>(i)] += 1;

    bool done = r.sim_error || r.termination != Termination::alive;
    if (done) {
      out.done[static_cast<size_t>(i)] = 1;
      out.fell[static_cast<size_t>(i)] =
          (r.sim_error || r.termination == Termination::fallen) ? 1 : 0;
      out.sim_error[static_cast<size_t>(i)] = r.sim_error ? 1 : 0;
      ++episodes_done_;
      if (r.termination == Termination::timeout) ++episodes_survived_;
      finished_track_err_sum_ += track_err_sum_[static_cast<size_t>(i)];
      finished_track_err_count_ += track_err_count_[static_cast<size_t>(i)];
      track_err_sum_[static_cast<size_t>(i)] = 0.0;
      track_err_count_[static_cast<size_t>(i)] = 0;
      env.reset();
    }
    out.actor_obs.col(i) = env.actor_observation();
    out.critic_obs.col(i) = env.critic_observation();
  }
}

double QuadrupedVecEnv::survival_rate() const {
  if (episodes_done_ == 0) return 0.0;
  return static_cast<double>(episodes_survived_) / static_cast<double>(episodes_done_);
}

double QuadrupedVecEnv::mean_episode_tracking_error() const {
  if (finished_track_err_count_ == 0) return 0.0;
  return finished_track_err_sum_ / static_cast<double>(finished_track_err_count_);
}

void QuadrupedVecEnv::clear_episode_stats() {
  episodes_done_ = 0;
  episodes_survived_ = 0;
  finished_track_err_sum_ = 0.0;
  finished_track_err_count_ = 0;
}

double QuadrupedVecEnv::mean_terrain_level() const {
  double s = 0.0;
  for (const auto& e : envs_) s += e->curriculum_state().terrain_level;
  return s / static_cast<double>(num_envs());
}

}  // namespace solo9
