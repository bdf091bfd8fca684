#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "solo9/core/config.hpp"
#include "solo9/core/rng.hpp"
#include "solo9/physics/spatial.hpp"
#include "solo9/physics/world.hpp"
#include "solo9/robot/robot_spec.hpp"

using namespace solo9;

static std::string config_path(const std::string& name) {
  return std::string(SOLO9_CONFIG_DIR) + "/" + name;
}

TEST_CASE("config: sections, keys, typed getters") {
  Config cfg = Config::parse(
      "[robot]\n"
      "name = solo9  # trailing comment\n"
      "mass = 2.3\n"
      "flag = true\n"
      "vec = 1 2.5 -3\n"
      "[link.a]\n"
      "x = 1\n"
      "[link.b]\n"
      "x = 2\n",
      "inline");
  CHECK(cfg.get_string("robot", "name") == "solo9");
  CHECK(cfg.get_double("robot", "mass") == doctest::Approx(2.3));
  CHECK(cfg.get_bool("robot", "flag"));
  CHECK(cfg.get_vector("robot", "vec").size() == 3);
  CHECK(cfg.get_vector("robot", "vec")[2] == doctest::Approx(-3.0));
  auto links = cfg.sections_with_prefix("link.");
  REQUIRE(links.size() == 2);
  CHECK(links[0] == "link.a");
  CHECK(cfg.get_double("robot", "absent", 7.0) == 7.0);
}

TEST_CASE("config: parse errors carry file and line") {
  try {
    Config::parse("[a]\nkey value-without-equals\n", "bad.cfg");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.file() == "bad.cfg");
  }
  Config cfg = Config::parse("[a]\nx = notanumber\n", "bad2.cfg");
  CHECK_THROWS_AS(cfg.get_double("a", "x"), ParseError);
  CHECK_THROWS_AS(cfg.get_double("missing", "x"), ValidationError);
}

TEST_CASE("config: overrides") {
  Config cfg = Config::parse("[rewards]\nc_slip = -1\n", "inline");
  cfg.set_override("rewards.c_slip=-2.5");
  CHECK(cfg.get_double("rewards", "c_slip") == doctest::Approx(-2.5));
  cfg.set_override("curriculum.max_level=4");
  CHECK(cfg.get_int("curriculum", "max_level") == 4);
  CHECK_THROWS_AS(cfg.set_override("nodots"), ValidationError);
}

TEST_CASE("rng: determinism and stream independence") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(42);
  Rng f1 = c.fork(1), f2 = c.fork(2);
  CHECK(f1.next_u64() != f2.next_u64());
  Rng d(7);
  for (int i = 0; i < 1000; ++i) {
    double u = d.uniform(-2.0, 3.0);
    CHECK(u >= -2.0);
    CHECK(u < 3.0);
    int k = d.uniform_int(0, 4);
    CHECK(k >= 0);
    CHECK(k <= 4);
  }
}

TEST_CASE("robot: solo9 spec loads with documented dimensions") {
  RobotSpec spec = load_robot_spec(config_path("solo9.robot"));
  CHECK(spec.actuated_count() == 9);
  CHECK(spec.body_length == doctest::Approx(0.465));
  CHECK(spec.body_width == doctest::Approx(0.31));
  CHECK(spec.total_mass == doctest::Approx(2.3));
  CHECK(spec.waist_joint() >= 0);
  // Waist is driven by two motors: limit is exactly twice the single-motor one.
  CHECK(spec.joints[spec.waist_joint()].torque_limit ==
        doctest::Approx(2.0 * spec.single_motor_torque));
  CHECK_FALSE(spec.joints[spec.waist_joint()].position_limits.has_value());

  double mass_sum = 0;
  for (const auto& l : spec.links) mass_sum += l.mass;
  CHECK(std::abs(mass_sum - spec.total_mass) < 1e-9);
  CHECK(spec.joints.size() == spec.links.size() - 1);
}

TEST_CASE("robot: solo8 spec loads with 8 actuated joints") {
  RobotSpec spec = load_robot_spec(config_path("solo8.robot"));
  CHECK(spec.actuated_count() == 8);
  CHECK(spec.total_mass == doctest::Approx(1.9));
  CHECK(spec.waist_joint() == -1);
}

TEST_CASE("robot: waist position limits are rejected") {
  RobotSpec spec = load_robot_spec(config_path("solo9.robot"));
  spec.joints[spec.waist_joint()].position_limits = Vec2(-1.0, 1.0);
  CHECK_THROWS_AS(spec.validate(), ValidationError);
}

TEST_CASE("robot: wrong waist torque limit is rejected") {
  RobotSpec spec = load_robot_spec(config_path("solo9.robot"));
  spec.joints[spec.waist_joint()].torque_limit = spec.single_motor_torque;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
}

TEST_CASE("robot: serialize/parse round trip is structurally equal") {
  RobotSpec spec = load_robot_spec(config_path("solo9.robot"));
  RobotSpec again = parse_robot_spec(Config::parse(serialize_robot_spec(spec), "roundtrip"));
  REQUIRE(again.links.size() == spec.links.size());
  REQUIRE(again.joints.size() == spec.joints.size());
  for (size_t i = 0; i < spec.links.size(); ++i) {
    CHECK(again.links[i].name == spec.links[i].name);
    CHECK(again.links[i].mass == doctest::Approx(spec.links[i].mass).epsilon(1e-12));
    CHECK((again.links[i].com - spec.links[i].com).norm() < 1e-15);
    CHECK(again.links[i].collision_points.size() == spec.links[i].collision_points.size());
  }
  for (size_t i = 0; i < spec.joints.size(); ++i) {
    CHECK(again.joints[i].name == spec.joints[i].name);
    CHECK(again.joints[i].type == spec.joints[i].type);
    CHECK((again.joints[i].origin - spec.joints[i].origin).norm() < 1e-15);
    CHECK(again.joints[i].default_position == spec.joints[i].default_position);
  }
}

TEST_CASE("robot: welding the waist gives the 8-joint ablation") {
  RobotSpec solo9 = load_robot_spec(config_path("solo9.robot"));
  RobotSpec welded = make_solo8_from_solo9(solo9);
  CHECK(welded.actuated_count() == 8);
  REQUIRE(welded.links.size() == solo9.links.size());
  for (size_t i = 0; i < solo9.links.size(); ++i)
    CHECK(welded.links[i].mass == solo9.links[i].mass);

  // Forward kinematics at the zero-waist pose must be identical.
  World w9(solo9), w8(welded);
  SimState s9 = w9.make_state();
  SimState s8 = w8.make_state();
  s9.q[0] = 0.0;  // waist at weld angle
  for (int b = 0; b < w9.model().nbodies(); ++b) {
    Xform p9 = w9.body_pose(s9, b);
    Xform p8 = w8.body_pose(s8, b);
    CHECK((p9.pos - p8.pos).norm() < 1e-12);
    CHECK((p9.rot - p8.rot).norm() < 1e-12);
  }

  CHECK_THROWS_AS(make_solo8_from_solo9(welded), ValidationError);
}

TEST_CASE("spatial: inertia transform matches 6x6 conjugation oracle") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    SpatialInertia I;
    I.mass = rng.uniform(0.1, 5.0);
    Vec3 com(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2));
    Vec3 diag(rng.uniform(0.01, 0.1), rng.uniform(0.01, 0.1), rng.uniform(0.01, 0.1));
    I = SpatialInertia::from_link(I.mass, com, diag);

    Vec3 axis(rng.normal(), rng.normal(), rng.normal());
    axis.normalize();
    Xform X{Eigen::AngleAxisd(rng.uniform(-3, 3), axis).toRotationMatrix(),
            Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1))};

    Mat6 Xm = X.motion_matrix_to_child();  // maps parent-frame motion to child
    Mat6 oracle = Xm.transpose() * I.matrix() * Xm;
    Mat6 ours = I.to_parent(X).matrix();
    CHECK((oracle - ours).norm() < 1e-10 * (1.0 + oracle.norm()));
  }
}

TEST_CASE("spatial: force/motion transforms preserve power") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    Vec3 axis(rng.normal(), rng.normal(), rng.normal());
    axis.normalize();
    Xform X{Eigen::AngleAxisd(rng.uniform(-3, 3), axis).toRotationMatrix(),
            Vec3(rng.normal(), rng.normal(), rng.normal())};
    Vec6 m, f;
    for (int i = 0; i < 6; ++i) {
      m[i] = rng.normal();
      f[i] = rng.normal();
    }
    // Power f . m is frame invariant.
    double p_child = f.dot(m);
    double p_parent = X.force_to_parent(f).dot(X.motion_to_parent(m));
    CHECK(p_child == doctest::Approx(p_parent).epsilon(1e-12));
    // Round trips.
    CHECK((X.motion_to_child(X.motion_to_parent(m)) - m).norm() < 1e-12);
    CHECK((X.force_to_child(X.force_to_parent(f)) - f).norm() < 1e-12);
  }
}
