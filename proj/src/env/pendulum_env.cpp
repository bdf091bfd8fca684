#include "solo9/env/pendulum_env.hpp"

#include <cmath>

namespace solo9 {
namespace {

RobotSpec upright_rod_spec() {
  RobotSpec s;
  s.name = "pendulum";
  s.floating_base = false;
  LinkSpec base;
  base.name = "base";
  base.mass = 1.0;
  base.inertia_diag = Vec3(0.01, 0.01, 0.01);
  s.links.push_back(base);
  LinkSpec rod;
  rod.name = "rod";
  rod.mass = 0.5;
  rod.com = Vec3(0, 0, -0.15);
  double irod = 0.5 * 0.3 * 0.3 / 12.0;
  rod.inertia_diag = Vec3(irod, irod, 0.0);
  s.links.push_back(rod);
  JointSpec j;
  j.name = "pivot";
  j.parent = 0;
  j.child = 1;
  j.axis = Vec3::UnitY();
  j.torque_limit = 1.2;
  j.damping = 0.05;
  j.default_position = M_PI;  // rod up
  s.joints.push_back(j);
  s.total_mass = 1.5;
  s.body_length = 0.3;
  s.body_width = 0.01;
  return s;
}

double wrap_pi(double a) {
  while (a > M_PI) a -= 2 * M_PI;
  while (a < -M_PI) a += 2 * M_PI;
  return a;
}

}  // namespace

PendulumVecEnv::PendulumVecEnv(int n_envs, uint64_t seed) : rng_(seed) {
  RobotSpec spec = upright_rod_spec();
  WorldParams wp;
  wp.contacts_enabled = false;
  envs_.resize(static_cast<size_t>(n_envs));
  for (auto& e : envs_) {
    e.world = std::make_unique<World>(spec, wp);
    e.state = e.world->make_state();
  }
  reset_all();
}

void PendulumVecEnv::reset_env(int i) {
  Env& e = envs_[static_cast<size_t>(i)];
  e.state = e.world->make_state();
  e.state.q[0] = M_PI + rng_.uniform(-0.6, 0.6);
  e.state.qd[0] = rng_.uniform(-0.5, 0.5);
  e.ret = 0.0;
  e.steps = 0;
}

void PendulumVecEnv::reset_all() {
  for (int i = 0; i < num_envs(); ++i) reset_env(i);
}

VecX PendulumVecEnv::obs_of(int i) const {
  const Env& e = envs_[static_cast<size_t>(i)];
  VecX o(3);
  o << std::cos(e.state.q[0]), std::sin(e.state.q[0]), e.state.qd[0];
  return o;
}

void PendulumVecEnv::observe(MatX& actor_obs, MatX& critic_obs) const {
  actor_obs.resize(3, num_envs());
  for (int i = 0; i < num_envs(); ++i) actor_obs.col(i) = obs_of(i);
  critic_obs = actor_obs;
}

void PendulumVecEnv::step(const MatX& actions, StepOut& out) {
  const int n = num_envs();
  out.actor_obs.resize(3, n);
  out.r_gait = VecX::Zero(n);
  out.r_constraint = VecX::Zero(n);
  out.r_turn = VecX::Zero(n);
  out.done.assign(static_cast<size_t>(n), 0);
  out.fell.assign(static_cast<size_t>(n), 0);
  out.sim_error.assign(static_cast<size_t>(n), 0);

  for (int i = 0; i < n; ++i) {
    Env& e = envs_[static_cast<size_t>(i)];
    double a = std::clamp(actions(0, i), -1.0, 1.0);
    VecX tau(1);
    tau[0] = torque_limit_ * a;
    for (int s = 0; s < 2; ++s) e.world->step(e.state, tau, 0.01);
    double err = wrap_pi(e.state.q[0] - M_PI);
    double r = std::exp(-4.0 * err * err) - 0.01 * a * a;
    out.r_turn[i] = r;
    e.ret += r;
    e.steps += 1;
    bool fell = std::abs(err) > 2.0;
    bool timeout = e.steps >= horizon_steps_;
    if (fell || timeout) {
      out.done[static_cast<size_t>(i)] = 1;
      out.fell[static_cast<size_t>(i)] = fell ? 1 : 0;
      finished_returns_.push_back(e.ret);
      reset_env(i);
    }
    out.actor_obs.col(i) = obs_of(i);
  }
  out.critic_obs = out.actor_obs;
}

double PendulumVecEnv::drain_episode_returns() {
  if (finished_returns_.empty()) return 0.0;
  double sum = 0.0;
  for (double r : finished_returns_) sum += r;
  double mean = sum / static_cast<double>(finished_returns_.size());
  finished_returns_.clear();
  return mean;
}

}  // namespace solo9
