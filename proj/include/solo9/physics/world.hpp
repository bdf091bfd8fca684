#pragma once

#include <vector>

#include "solo9/physics/model.hpp"
#include "solo9/physics/terrain.hpp"

namespace solo9 {

struct ContactParams {
  double stiffness = 4000.0;       // N/m
  double damping = 40.0;           // N s/m, normal direction
  double friction = 1.0;           // Coulomb mu
  double tangent_damping = 2000.0; // N s/m inside the friction cone
  double force_threshold = 1.0;    // N, raw contact indicator for C_i
  int filter_window = 2;           // substeps, C_i debounce
  double slip_eps = 1e-3;          // m/s, cone regularization boundary layer
};

struct WorldParams {
  double gravity = 9.81;
  ContactParams contact;
  double limit_stiffness = 30.0;   // soft joint-limit spring, N m/rad
  double limit_damping = 0.5;
  bool contacts_enabled = true;
  bool collect_diagnostics = false;
};

struct ContactForce {
  int point = -1;
  Vec3 position = Vec3::Zero();  // world
  Vec3 force = Vec3::Zero();     // world, applied to the robot
};

/// Momentum bookkeeping filled when collect_diagnostics is set: both sides of
/// the Newton identity sum(d/dt momentum) == gravity + contact wrench, world
/// frame, torques about the world origin.
struct StepDiagnostics {
  Vec6 momentum_rate = Vec6::Zero();
  Vec6 external_wrench = Vec6::Zero();
  std::vector<ContactForce> contacts;
};

/// One robot in one terrain: articulated dynamics in generalized coordinates
/// with spring-damper penalty contact and Coulomb-capped regularized friction.
///
/// Joint-space equations are assembled per substep (composite-rigid-body mass
/// matrix, recursive Newton-Euler bias) and integrated semi-implicitly; joint
/// and contact damping are folded into the velocity solve so stiff damping
/// stays stable at the default substep.
class World {
 public:
  explicit World(const RobotSpec& spec, WorldParams params = WorldParams(),
                 Terrain terrain = Terrain());

  const Model& model() const { return model_; }
  Model& mutable_model() { return model_; }
  const Terrain& terrain() const { return terrain_; }
  void set_terrain(Terrain t) { terrain_ = std::move(t); }
  WorldParams& params() { return params_; }
  const WorldParams& params() const { return params_; }

  /// State at the default pose; caller places the base.
  SimState make_state() const;

  /// Advances one fixed substep. Torques are clamped to joint limits.
  /// Throws SimulationError on non-finite input or resulting state.
  void step(SimState& state, const VecX& joint_torques, double dt);

  /// Instantaneous generalized accelerations (explicit contact damping),
  /// without integrating. Used by dynamics oracles.
  VecX forward_dynamics(const SimState& state, const VecX& joint_torques) const;

  struct FootObs {
    double height = 0.0;   // foot z relative to local terrain, m
    Vec2 plane_vel = Vec2::Zero();  // world xy, m/s
    bool contact = false;  // filtered C_i
  };
  std::vector<FootObs> foot_kinematics(const SimState& state) const;

  Xform body_pose(const SimState& state, int body) const;
  Vec3 point_position(const SimState& state, int point) const;

  double total_energy(const SimState& state) const;  // kinetic + gravity potential
  /// World-frame [angular momentum about origin; linear momentum].
  Vec6 total_momentum(const SimState& state) const;

  const StepDiagnostics& diagnostics() const { return diag_; }

 private:
  struct Workspace {
    std::vector<Xform> local;   // pose of body in parent
    std::vector<Xform> world;   // pose of body in world
    std::vector<Vec6> vel;      // body-frame spatial velocity
    std::vector<Vec6> bias_f;   // RNEA buffers
    std::vector<SpatialInertia> composite;
    MatX H;
    VecX C;
    MatX A;
    VecX rhs;
  };

  void compute_kinematics(const SimState& state) const;
  void mass_matrix(MatX& H) const;
  void bias_forces(const SimState& state, VecX& C) const;
  void point_state(int point, Vec3& pos_w, Vec3& vel_w) const;
  void point_jacobian(int point, const Vec3& pos_w, MatX& J) const;
  VecX applied_joint_torques(const SimState& state, const VecX& raw) const;
  void fill_diagnostics(const SimState& state, const VecX& udot,
                        const std::vector<ContactForce>& contacts) const;

  Model model_;
  Terrain terrain_;
  WorldParams params_;
  mutable Workspace ws_;
  mutable StepDiagnostics diag_;
};

/// Instantaneous planar velocity kick on the base (disturbance tests).
void apply_push(SimState& state, const Vec2& delta_v);

}  // namespace solo9
