#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "solo9/env/quadruped_env.hpp"
#include "solo9/env/quadruped_vec_env.hpp"

using namespace solo9;

static std::string config_path(const std::string& name) {
  return std::string(SOLO9_CONFIG_DIR) + "/" + name;
}

TEST_CASE("rewards: yaw-rate kernel, both modes, against direct arithmetic") {
  CHECK(reward_angvel(0.3, 0.3, 2.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(reward_angvel(0.3, 0.3, 2.0, 0.25, true) == doctest::Approx(2.0).epsilon(1e-15));
  // -0.4 command, 0 actual, sigma 0.25: exp(-0.16/0.0625) = exp(-2.56).
  CHECK(reward_angvel(-0.4, 0.0, 1.0, 0.25) ==
        doctest::Approx(std::exp(-2.56)).epsilon(1e-12));

  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    double cmd = rng.uniform(-2, 2), wz = rng.uniform(-2, 2);
    double c = rng.uniform(0, 3), sigma = rng.uniform(0.05, 1.0);
    double oracle = c * std::exp(-((cmd - wz) * (cmd - wz)) / (sigma * sigma));
    double got = reward_angvel(cmd, wz, c, sigma);
    CHECK(std::abs(got - oracle) <= 1e-12 * std::max(1.0, std::abs(oracle)));
    double oracle_lit = c * std::exp((cmd - wz) * (cmd - wz));
    CHECK(std::abs(reward_angvel(cmd, wz, c, sigma, true) - oracle_lit) <=
          1e-12 * std::max(1.0, std::abs(oracle_lit)));
  }

  // Default mode strictly decreases in |error|.
  double prev = reward_angvel(0.0, 0.0, 1.0);
  for (double e = 0.1; e < 2.0; e += 0.1) {
    double r = reward_angvel(e, 0.0, 1.0);
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("rewards: slip kernel") {
  Eigen::Matrix<double, 2, 4> v;
  v.setZero();
  std::array<bool, 4> none{false, false, false, false};
  CHECK(reward_slip(none, v, -1.0) == 0.0);

  v.col(2) = Vec2(0.3, 0.4);
  std::array<bool, 4> one{false, false, true, false};
  CHECK(reward_slip(one, v, -1.0) == doctest::Approx(-0.25).epsilon(1e-15));

  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    std::array<bool, 4> c;
    Eigen::Matrix<double, 2, 4> vel;
    for (int f = 0; f < 4; ++f) {
      c[static_cast<size_t>(f)] = rng.uniform01() < 0.5;
      vel.col(f) = Vec2(rng.uniform(-2, 2), rng.uniform(-2, 2));
    }
    double w = -rng.uniform(0, 2);
    double oracle = 0;
    for (int f = 0; f < 4; ++f)
      if (c[static_cast<size_t>(f)])
        oracle += vel(0, f) * vel(0, f) + vel(1, f) * vel(1, f);
    oracle *= w;
    CHECK(std::abs(reward_slip(c, vel, w) - oracle) <= 1e-12 * std::max(1.0, std::abs(oracle)));
    // Quadratic homogeneity.
    CHECK(reward_slip(c, 2 * vel, w) == doctest::Approx(4 * reward_slip(c, vel, w)).epsilon(1e-12));
  }
}

TEST_CASE("rewards: clearance kernel") {
  Eigen::Matrix<double, 2, 4> v;
  v.setOnes();
  Vec4 h = Vec4::Constant(0.05);
  CHECK(reward_clearance(h, v, 0.05, -1.0) == 0.0);
  v.setZero();
  h.setConstant(0.01);
  CHECK(reward_clearance(h, v, 0.05, -1.0) == 0.0);

  Eigen::Matrix<double, 2, 4> v1;
  v1.setZero();
  v1.col(0) = Vec2(1.0, 0.0);
  Vec4 h1 = Vec4::Constant(0.05);
  h1[0] = 0.0;
  CHECK(reward_clearance(h1, v1, 0.05, -1.0) == doctest::Approx(-0.0025).epsilon(1e-12));

  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    Vec4 hh;
    Eigen::Matrix<double, 2, 4> vv;
    for (int f = 0; f < 4; ++f) {
      hh[f] = rng.uniform(-0.05, 0.2);
      vv.col(f) = Vec2(rng.uniform(-2, 2), rng.uniform(-2, 2));
    }
    double pmax = rng.uniform(0.01, 0.1), w = -rng.uniform(0, 20);
    double oracle = 0;
    for (int f = 0; f < 4; ++f)
      oracle += (hh[f] - pmax) * (hh[f] - pmax) * vv.col(f).squaredNorm();
    oracle *= w;
    CHECK(std::abs(reward_clearance(hh, vv, pmax, w) - oracle) <=
          1e-12 * std::max(1.0, std::abs(oracle)));
  }
}

TEST_CASE("rewards: smoothness kernel") {
  VecX a = VecX::LinSpaced(9, 0, 1), b = a;
  CHECK(reward_smooth(a, b, -1.0) == 0.0);
  b[4] += 0.1;
  CHECK(reward_smooth(a, b, -1.0) == doctest::Approx(-0.01).epsilon(1e-12));

  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    VecX x(9), y(9);
    for (int j = 0; j < 9; ++j) {
      x[j] = rng.uniform(-2, 2);
      y[j] = rng.uniform(-2, 2);
    }
    double w = -rng.uniform(0, 1);
    double oracle = w * (x - y).squaredNorm();
    CHECK(std::abs(reward_smooth(x, y, w) - oracle) <= 1e-12 * std::max(1.0, std::abs(oracle)));
    // Permutation invariance.
    VecX xp = x, yp = y;
    std::swap(xp[0], xp[8]);
    std::swap(yp[0], yp[8]);
    CHECK(reward_smooth(xp, yp, w) == doctest::Approx(reward_smooth(x, y, w)).epsilon(1e-12));
  }
}

TEST_CASE("rewards: total mix") {
  CHECK(total_reward(2.0, 1.0, -0.5, 0.5, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(total_reward(2.0, 1.0, -0.5, 0.5, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(total_reward(2.0, 1.0, -0.5, 0.5, 0.5) == doctest::Approx(1.5).epsilon(1e-15));
  RewardWeights w;
  w.w_imitation = 1.5;
  CHECK_THROWS_AS(w.validate(), ValidationError);
  RewardWeights w2;
  w2.c_slip = 0.2;
  CHECK_THROWS_AS(w2.validate(), ValidationError);
}

TEST_CASE("observations: 33/36 for solo9, 30/33 for solo8, prefix bit-equal") {
  RobotSpec s9 = load_robot_spec(config_path("solo9.robot"));
  EnvConfig cfg;
  cfg.randomize = false;
  QuadrupedEnv env(s9, cfg, 1);
  VecX actor = env.actor_observation();
  VecX critic = env.critic_observation();
  REQUIRE(actor.size() == 33);
  REQUIRE(critic.size() == 36);
  CHECK((critic.head(33) - actor).norm() == 0.0);

  // q_prev equals the initial q right after reset.
  CHECK((actor.segment(24, 9) - actor.segment(6, 9)).norm() == 0.0);

  RobotSpec s8 = load_robot_spec(config_path("solo8.robot"));
  QuadrupedEnv env8(s8, cfg, 1);
  CHECK(env8.actor_observation().size() == 30);
  CHECK(env8.critic_observation().size() == 33);

  // After a step, q_prev holds the pre-step joint angles.
  VecX q_before = env.state().q;
  env.step(VecX::Constant(9, 0.1));
  VecX obs2 = env.actor_observation();
  CHECK((obs2.segment(24, 9) - q_before).norm() == 0.0);
}

TEST_CASE("randomization: samples stay in the stated ranges, reproducible") {
  RandomizationRanges r;
  for (uint64_t seed = 0; seed < 300; ++seed) {
    EnvOverrides o = randomize_env(r, seed, 1.84);
    CHECK(o.friction_mult >= 0.2);
    CHECK(o.friction_mult <= 2.5);
    CHECK(o.added_base_mass >= -0.7);
    CHECK(o.added_base_mass <= 1.5);
    for (int a = 0; a < 3; ++a) {
      CHECK(o.com_offset[a] >= -0.015);
      CHECK(o.com_offset[a] <= 0.015);
    }
    CHECK(o.init_angle_mult >= 0.9);
    CHECK(o.init_angle_mult <= 1.1);
    CHECK(o.cmd_lin >= 0.0);
    CHECK(o.cmd_lin <= 1.0);
    CHECK(o.cmd_ang >= -0.5);
    CHECK(o.cmd_ang <= 0.5);
  }
  EnvOverrides a = randomize_env(r, 42, 1.84), b = randomize_env(r, 42, 1.84);
  CHECK(a.friction_mult == b.friction_mult);
  CHECK(a.cmd_ang == b.cmd_ang);

  // Collapsed ranges give exact constants.
  RandomizationRanges point;
  point.friction = Vec2(1.3, 1.3);
  point.base_mass = Vec2(0.2, 0.2);
  point.center_of_mass = Vec2(0.5, 0.5);
  point.initial_joint_angles = Vec2(1.0, 1.0);
  point.lin_vel_cmd = Vec2(0.6, 0.6);
  point.ang_vel_cmd = Vec2(-0.4, -0.4);
  EnvOverrides o = randomize_env(point, 7, 1.84);
  CHECK(o.friction_mult == 1.3);
  CHECK(o.added_base_mass == 0.2);
  CHECK(o.cmd_lin == 0.6);
  CHECK(o.cmd_ang == -0.4);

  // A range that cannot keep the mass positive errors out after retries.
  RandomizationRanges bad;
  bad.base_mass = Vec2(-5.0, -4.0);
  CHECK_THROWS_AS(randomize_env(bad, 1, 1.84), ValidationError);

  RandomizationRanges inverted;
  inverted.friction = Vec2(2.0, 1.0);
  CHECK_THROWS_AS(randomize_env(inverted, 1, 1.84), ValidationError);
}

TEST_CASE("curriculum: promotion, demotion, hold, bounds, reshuffle") {
  Rng rng(5);
  CurriculumState cs;
  cs.terrain_level = 2;
  cs.pd_gain_level = 2;

  CurriculumState up = curriculum_update(cs, 2.0, 2.0, 5, rng);
  CHECK(up.terrain_level == 3);
  CHECK(up.pd_gain_level == 3);

  CurriculumState down = curriculum_update(cs, 0.8, 2.0, 5, rng);
  CHECK(down.terrain_level == 1);

  CurriculumState hold = curriculum_update(cs, 1.4, 2.0, 5, rng);
  CHECK(hold.terrain_level == 2);

  CurriculumState floor;
  CurriculumState still = curriculum_update(floor, 0.0, 2.0, 5, rng);
  CHECK(still.terrain_level == 0);

  // Promotion at max level reshuffles uniformly within bounds.
  CurriculumState top;
  top.terrain_level = 5;
  top.pd_gain_level = 5;
  std::set<int> seen;
  for (int i = 0; i < 200; ++i) {
    CurriculumState r = curriculum_update(top, 3.0, 2.0, 5, rng);
    CHECK(r.terrain_level >= 0);
    CHECK(r.terrain_level <= 5);
    seen.insert(r.terrain_level);
  }
  CHECK(seen.size() >= 4);

  // Level moves by at most one except on reshuffle.
  for (int lvl = 0; lvl < 5; ++lvl) {
    CurriculumState c;
    c.terrain_level = lvl;
    c.pd_gain_level = lvl;
    for (double walked : {0.0, 1.5, 3.0}) {
      CurriculumState n = curriculum_update(c, walked, 2.0, 5, rng);
      CHECK(std::abs(n.terrain_level - lvl) <= 1);
    }
  }
}

TEST_CASE("action: pd mode at rest in default pose gives zero torque") {
  RobotSpec s9 = load_robot_spec(config_path("solo9.robot"));
  VecX q = s9.default_pose();
  VecX qd = VecX::Zero(9);
  std::vector<double> limits;
  for (int j : s9.actuated_joints()) limits.push_back(s9.joints[static_cast<size_t>(j)].torque_limit);
  VecX tau = apply_action(VecX::Zero(9), ActionMode::pd_target, 4.0, 0.2, 0.5,
                          s9.default_pose(), q, qd, limits);
  CHECK(tau.norm() == 0.0);
}

TEST_CASE("action: torques never exceed per-joint limits; waist limit is 2x") {
  RobotSpec s9 = load_robot_spec(config_path("solo9.robot"));
  std::vector<double> limits;
  for (int j : s9.actuated_joints()) limits.push_back(s9.joints[static_cast<size_t>(j)].torque_limit);
  CHECK(limits[0] == doctest::Approx(2.0 * s9.single_motor_torque));
  CHECK(limits[1] == doctest::Approx(s9.single_motor_torque));

  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    VecX a(9), q(9), qd(9);
    for (int j = 0; j < 9; ++j) {
      a[j] = rng.uniform(-30, 30);
      q[j] = rng.uniform(-2, 2);
      qd[j] = rng.uniform(-20, 20);
    }
    for (ActionMode mode : {ActionMode::pd_target, ActionMode::direct_torque}) {
      VecX tau = apply_action(a, mode, 8.0, 0.5, 0.5, s9.default_pose(), q, qd, limits);
      for (int j = 0; j < 9; ++j) CHECK(std::abs(tau[j]) <= limits[static_cast<size_t>(j)] + 1e-12);
    }
  }
}

TEST_CASE("termination: standing alive, low base fallen, horizon timeout") {
  RobotSpec s9 = load_robot_spec(config_path("solo9.robot"));
  World w(s9);
  SimState s = w.make_state();
  s.base_pos = Vec3(0, 0, 0.22);
  CHECK(check_termination(s, 0.0, 0.08, 1.2, false, 15.0) == Termination::alive);

  s.base_pos.z() = 0.05;
  CHECK(check_termination(s, 0.0, 0.08, 1.2, false, 15.0) == Termination::fallen);

  s.base_pos.z() = 0.22;
  s.base_quat = Quat(Eigen::AngleAxisd(1.4, Vec3::UnitX()));
  CHECK(check_termination(s, 0.0, 0.08, 1.2, false, 15.0) == Termination::fallen);

  s.base_quat = Quat::Identity();
  CHECK(check_termination(s, 0.0, 0.08, 1.2, true, 15.0) == Termination::fallen);

  s.time = 15.0;
  CHECK(check_termination(s, 0.0, 0.08, 1.2, false, 15.0) == Termination::timeout);
}

TEST_CASE("env: standing under PD hold survives; overrides are applied") {
  RobotSpec s9 = load_robot_spec(config_path("solo9.robot"));
  EnvConfig cfg;
  cfg.randomize = false;
  cfg.horizon = 1.0;
  QuadrupedEnv env(s9, cfg, 3);
  int steps = 0;
  QuadrupedEnv::StepResult r;
  while (steps < 60) {
    r = env.step(VecX::Zero(9));
    ++steps;
    if (r.termination != Termination::alive) break;
  }
  CHECK(r.termination == Termination::timeout);
  CHECK(steps == 50);  // 1 s horizon at 50 Hz

  EnvConfig cfg2;
  cfg2.randomize = true;
  QuadrupedEnv env2(s9, cfg2, 7);
  const EnvOverrides& o = env2.overrides();
  CHECK(env2.world().params().contact.friction ==
        doctest::Approx(cfg2.world.contact.friction * o.friction_mult));
  double trunk = env2.world().model().bodies[0].inertia.mass +
                 env2.world().model().bodies[1].inertia.mass;
  CHECK(trunk == doctest::Approx(1.84 + o.added_base_mass).epsilon(1e-9));
}

TEST_CASE("env: solo9_free zeroes the waist torque but keeps the joint") {
  RobotSpec s9 = load_robot_spec(config_path("solo9.robot"));
  EnvConfig cfg;
  cfg.randomize = false;
  QuadrupedEnv env(s9, cfg, 1);
  env.set_waist_unpowered(true);
  env.reset();
  VecX a = VecX::Constant(9, 0.8);
  env.step(a);
  CHECK(env.last_torques()[0] == 0.0);
  CHECK(env.last_torques().tail(8).norm() > 0.0);

  // solo9_fixed: the welded model has no waist dof at all.
  RobotSpec fixed = make_solo8_from_solo9(s9);
  QuadrupedEnv envf(fixed, cfg, 1);
  CHECK(envf.nq() == 8);
}

TEST_CASE("vec env: 9-dof discriminator features for welded robots") {
  RobotSpec s9 = load_robot_spec(config_path("solo9.robot"));
  RobotSpec fixed = make_solo8_from_solo9(s9);
  EnvConfig cfg;
  cfg.randomize = false;
  QuadrupedVecEnv venv(fixed, cfg, 2, 3);
  CHECK(venv.disc_dim() == 27);
  MatX d;
  venv.observe_disc(d);
  REQUIRE(d.rows() == 27);
  // Waist channels (q_0 at index 9, qd_0 at index 18) are zero.
  CHECK(d(9, 0) == 0.0);
  CHECK(d(18, 0) == 0.0);
  CHECK(d.col(0).tail(18).norm() > 0.0);
}
