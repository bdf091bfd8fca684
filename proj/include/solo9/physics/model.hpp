#pragma once

#include <string>
#include <vector>

#include "solo9/physics/spatial.hpp"
#include "solo9/robot/robot_spec.hpp"

namespace solo9 {

/// Kinematic tree compiled from a RobotSpec for the dynamics core.
///
/// Body i's frame sits at the anchor of its parent joint, axes aligned with
/// the parent frame at q = 0. Link com/inertia/collision offsets are
/// interpreted in that frame. Body 0 is the root (front base).
struct Model {
  struct Body {
    std::string name;
    int parent = -1;
    // Joint connecting this body to its parent (unused for the root).
    JointType joint_type = JointType::revolute;
    Vec3 joint_axis = Vec3::UnitX();
    Vec3 joint_origin = Vec3::Zero();  // anchor in parent frame
    double fixed_angle = 0.0;          // for welded joints
    int dof = -1;                      // index into q/qd, -1 if fixed or root
    SpatialInertia inertia;            // in body frame, about body origin
  };

  struct Point {
    std::string name;
    int body = -1;
    Vec3 offset = Vec3::Zero();
    bool is_foot = false;
  };

  std::vector<Body> bodies;
  std::vector<Point> points;       // collision points; feet first, config order
  std::vector<int> foot_points;    // indices into `points`
  std::vector<double> damping;     // per dof
  std::vector<double> armature;    // per dof
  std::vector<double> torque_limit;  // per dof
  std::vector<double> default_q;   // per dof
  std::vector<Vec2> position_limits;  // per dof, (nan, nan) when unlimited
  bool floating_base = true;
  double total_mass = 0.0;

  int nq() const { return static_cast<int>(damping.size()); }
  int nv() const { return (floating_base ? 6 : 0) + nq(); }
  int nbodies() const { return static_cast<int>(bodies.size()); }

  static Model compile(const RobotSpec& spec);
};

/// Full dynamic state of one simulated robot.
struct SimState {
  Vec3 base_pos = Vec3::Zero();
  Quat base_quat = Quat::Identity();
  Vec6 base_vel = Vec6::Zero();  // spatial [omega; v], base-body frame
  VecX q, qd;
  double time = 0.0;

  // Filtered per-foot contact indicator C_i and its raw debounce window.
  std::vector<uint8_t> foot_contact;
  std::vector<uint8_t> contact_window;  // n_feet * window ring buffer
  int window_cursor = 0;

  // Cached world-frame foot kinematics, refreshed by each substep.
  MatX foot_pos;  // 3 x n_feet
  MatX foot_vel;  // 3 x n_feet

  // Sticky flag: a non-foot collision point touched the terrain. The env
  // clears it at each control step when checking termination.
  bool nonfoot_contact = false;

  static SimState init(const Model& model, int filter_window);

  Vec3 base_lin_vel_world() const { return base_quat * lin_part(base_vel); }
  Vec3 base_ang_vel_world() const { return base_quat * ang_part(base_vel); }
  bool finite() const {
    return base_pos.allFinite() && base_vel.allFinite() && q.allFinite() && qd.allFinite() &&
           base_quat.coeffs().allFinite();
  }
};

}  // namespace solo9
