#include "solo9/physics/world.hpp"

#include <cmath>

namespace solo9 {

World::World(const RobotSpec& spec, WorldParams params, Terrain terrain)
    : model_(Model::compile(spec)), terrain_(std::move(terrain)), params_(params) {
  int nb = model_.nbodies();
  ws_.local.resize(nb);
  ws_.world.resize(nb);
  ws_.vel.resize(nb);
  ws_.bias_f.resize(nb);
  ws_.composite.resize(nb);
  ws_.H = MatX::Zero(model_.nv(), model_.nv());
  ws_.C = VecX::Zero(model_.nv());
  ws_.A = MatX::Zero(model_.nv(), model_.nv());
  ws_.rhs = VecX::Zero(model_.nv());
}

SimState World::make_state() const {
  SimState s = SimState::init(model_, params_.contact.filter_window);
  return s;
}

void World::compute_kinematics(const SimState& state) const {
  const int nb = model_.nbodies();
  for (int i = 0; i < nb; ++i) {
    const Model::Body& b = model_.bodies[static_cast<size_t>(i)];
    if (b.parent < 0) {
      if (model_.floating_base) {
        ws_.world[0] = Xform{state.base_quat.toRotationMatrix(), state.base_pos};
        ws_.vel[0] = state.base_vel;
      } else {
        ws_.world[0] = Xform::identity();
        ws_.vel[0] = Vec6::Zero();
      }
      ws_.local[0] = ws_.world[0];
      continue;
    }
    double angle = b.joint_type == JointType::revolute ? state.q[b.dof] : b.fixed_angle;
    Xform local{Eigen::AngleAxisd(angle, b.joint_axis).toRotationMatrix(), b.joint_origin};
    ws_.local[static_cast<size_t>(i)] = local;
    ws_.world[static_cast<size_t>(i)] = ws_.world[static_cast<size_t>(b.parent)] * local;
    Vec6 v = local.motion_to_child(ws_.vel[static_cast<size_t>(b.parent)]);
    if (b.dof >= 0) v += spatial(b.joint_axis * state.qd[b.dof], Vec3::Zero());
    ws_.vel[static_cast<size_t>(i)] = v;
  }
}

void World::mass_matrix(MatX& H) const {
  const int nb = model_.nbodies();
  const int off = model_.floating_base ? 6 : 0;
  H.setZero();
  for (int i = 0; i < nb; ++i) ws_.composite[static_cast<size_t>(i)] = model_.bodies[static_cast<size_t>(i)].inertia;
  for (int i = nb - 1; i >= 1; --i) {
    const Model::Body& b = model_.bodies[static_cast<size_t>(i)];
    ws_.composite[static_cast<size_t>(b.parent)] +=
        ws_.composite[static_cast<size_t>(i)].to_parent(ws_.local[static_cast<size_t>(i)]);
  }
  if (model_.floating_base) H.topLeftCorner<6, 6>() = ws_.composite[0].matrix();
  for (int i = 1; i < nb; ++i) {
    const Model::Body& b = model_.bodies[static_cast<size_t>(i)];
    if (b.dof < 0) continue;
    const int row = off + b.dof;
    Vec6 F = ws_.composite[static_cast<size_t>(i)].times(spatial(b.joint_axis, Vec3::Zero()));
    H(row, row) = b.joint_axis.dot(ang_part(F)) + model_.armature[static_cast<size_t>(b.dof)];
    int k = i;
    while (model_.bodies[static_cast<size_t>(k)].parent >= 0) {
      F = ws_.local[static_cast<size_t>(k)].force_to_parent(F);
      k = model_.bodies[static_cast<size_t>(k)].parent;
      const Model::Body& bk = model_.bodies[static_cast<size_t>(k)];
      if (bk.dof >= 0) {
        const int col = off + bk.dof;
        H(row, col) = H(col, row) = bk.joint_axis.dot(ang_part(F));
      }
    }
    if (model_.floating_base) {
      H.block<6, 1>(0, row) = F;
      H.block<1, 6>(row, 0) = F.transpose();
    }
  }
}

void World::bias_forces(const SimState& state, VecX& C) const {
  const int nb = model_.nbodies();
  const int off = model_.floating_base ? 6 : 0;
  C.setZero();
  // Gravity enters as a fictitious upward base acceleration.
  std::vector<Vec6>& acc = ws_.bias_f;  // reused: forward pass stores accelerations
  std::vector<Vec6> force(static_cast<size_t>(nb));
  Vec3 up_accel = ws_.world[0].rot.transpose() * Vec3(0, 0, params_.gravity);
  acc[0] = spatial(Vec3::Zero(), up_accel);
  force[0] = model_.bodies[0].inertia.times(acc[0]) +
             cross_force(ws_.vel[0], model_.bodies[0].inertia.times(ws_.vel[0]));
  for (int i = 1; i < nb; ++i) {
    const Model::Body& b = model_.bodies[static_cast<size_t>(i)];
    Vec6 a = ws_.local[static_cast<size_t>(i)].motion_to_child(acc[static_cast<size_t>(b.parent)]);
    if (b.dof >= 0) {
      Vec6 vj = spatial(b.joint_axis * state.qd[b.dof], Vec3::Zero());
      a += cross_motion(ws_.vel[static_cast<size_t>(i)], vj);
    }
    acc[static_cast<size_t>(i)] = a;
    const SpatialInertia& I = b.inertia;
    force[static_cast<size_t>(i)] =
        I.times(a) + cross_force(ws_.vel[static_cast<size_t>(i)], I.times(ws_.vel[static_cast<size_t>(i)]));
  }
  for (int i = nb - 1; i >= 1; --i) {
    const Model::Body& b = model_.bodies[static_cast<size_t>(i)];
    if (b.dof >= 0) C[off + b.dof] = b.joint_axis.dot(ang_part(force[static_cast<size_t>(i)]));
    force[static_cast<size_t>(b.parent)] +=
        ws_.local[static_cast<size_t>(i)].force_to_parent(force[static_cast<size_t>(i)]);
  }
  if (model_.floating_base) C.head<6>() = force[0];
}

void World::point_state(int point, Vec3& pos_w, Vec3& vel_w) const {
  const Model::Point& pt = model_.points[static_cast<size_t>(point)];
  const Xform& X = ws_.world[static_cast<size_t>(pt.body)];
  const Vec6& v = ws_.vel[static_cast<size_t>(pt.body)];
  pos_w = X.apply_point(pt.offset);
  vel_w = X.rot * (lin_part(v) + ang_part(v).cross(pt.offset));
}

void World::point_jacobian(int point, const Vec3& pos_w, MatX& J) const {
  const Model::Point& pt = model_.points[static_cast<size_t>(point)];
  const int off = model_.floating_base ? 6 : 0;
  J.setZero(3, model_.nv());
  if (model_.floating_base) {
    const Xform& base = ws_.world[0];
    Vec3 r = base.inv_point(pos_w);
    J.block<3, 3>(0, 0) = -base.rot * skew(r);
    J.block<3, 3>(0, 3) = base.rot;
  }
  int k = pt.body;
  while (model_.bodies[static_cast<size_t>(k)].parent >= 0) {
    const Model::Body& b = model_.bodies[static_cast<size_t>(k)];
    if (b.dof >= 0) {
      Vec3 axis_w = ws_.world[static_cast<size_t>(k)].rot * b.joint_axis;
      Vec3 origin_w = ws_.world[static_cast<size_t>(k)].pos;
      J.col(off + b.dof) = axis_w.cross(pos_w - origin_w);
    }
    k = b.parent;
  }
}

VecX World::applied_joint_torques(const SimState& state, const VecX& raw) const {
  VecX tau = raw;
  for (int j = 0; j < model_.nq(); ++j) {
    double lim = model_.torque_limit[static_cast<size_t>(j)];
    if (lim > 0) tau[j] = std::clamp(tau[j], -lim, lim);
    const Vec2& pl = model_.position_limits[static_cast<size_t>(j)];
    if (!std::isnan(pl.x())) {
      // Soft limit spring outside the allowed range.
      if (state.q[j] < pl.x())
        tau[j] += params_.limit_stiffness * (pl.x() - state.q[j]) -
                  params_.limit_damping * std::min(state.qd[j], 0.0);
      else if (state.q[j] > pl.y())
        tau[j] += params_.limit_stiffness * (pl.y() - state.q[j]) -
                  params_.limit_damping * std::max(state.qd[j], 0.0);
    }
  }
  return tau;
}

void World::step(SimState& state, const VecX& joint_torques, double dt) {
  if (dt <= 0.0) throw SimulationError("substep dt must be > 0");
  if (joint_torques.size() != model_.nq())
    throw SimulationError("torque vector size mismatch");
  if (!joint_torques.allFinite() || !state.finite())
    throw SimulationError("non-finite torque or state entering step");

  compute_kinematics(state);
  mass_matrix(ws_.H);
  bias_forces(state, ws_.C);

  const int nv = model_.nv();
  const int off = model_.floating_base ? 6 : 0;
  const int nq = model_.nq();

  VecX u(nv);
  if (model_.floating_base) u.head<6>() = state.base_vel;
  u.tail(nq) = state.qd;

  ws_.A = ws_.H;
  ws_.rhs.setZero();
  VecX tau = applied_joint_torques(state, joint_torques);
  ws_.rhs.tail(nq) = tau;
  ws_.rhs -= ws_.C;

  // Joint damping, implicit: put d on the LHS diagonal, -d*u on the rhs.
  for (int j = 0; j < nq; ++j) {
    double d = model_.damping[static_cast<size_t>(j)];
    if (d > 0) {
      ws_.A(off + j, off + j) += dt * d;
      ws_.rhs[off + j] -= d * u[off + j];
    }
  }

  // Penalty contacts: explicit spring, implicit damping with an effective
  // tangential coefficient capped so that |F_t| <= mu * F_n (regularized
  // Coulomb cone). The normal damping is reduced on separation so the
  // contact never pulls. The cap depends on the post-solve velocity, so the
  // solve runs twice: once with pre-step velocities, once with the caps
  // re-evaluated at the first solution.
  struct ActiveContact {
    int point;
    Vec3 pos;
    MatX J;
    double spring;
    Mat3 Cpt;
  };
  std::vector<ActiveContact> active;
  const ContactParams& cp = params_.contact;
  if (params_.contacts_enabled) {
    MatX J(3, nv);
    for (int p = 0; p < static_cast<int>(model_.points.size()); ++p) {
      Vec3 pos_w, vel_w;
      point_state(p, pos_w, vel_w);
      double phi = pos_w.z() - terrain_.height_at(pos_w.x(), pos_w.y());
      if (phi >= 0.0) continue;
      ActiveContact ac;
      ac.point = p;
      ac.pos = pos_w;
      point_jacobian(p, pos_w, J);
      ac.J = J;
      ac.spring = cp.stiffness * (-phi);
      active.push_back(std::move(ac));
      if (!model_.points[static_cast<size_t>(p)].is_foot) state.nonfoot_contact = true;
    }
  }

  const MatX A_nc = ws_.A;
  const VecX rhs_nc = ws_.rhs;
  VecX u_est = u;
  VecX udot = VecX::Zero(nv);
  const int max_passes = active.empty() ? 1 : 16;
  for (int pass = 0; pass < max_passes; ++pass) {
    ws_.A = A_nc;
    ws_.rhs = rhs_nc;
    double cap_shift = 0.0;
    // Relaxed fixed-point update of the damping caps keeps the iteration
    // from limit-cycling near contact break.
    double mix = pass < 2 ? 1.0 : 0.5;
    for (auto& ac : active) {
      Vec3 v_est = ac.J * u_est;
      double vn = v_est.z();
      double cn = cp.damping;
      if (vn > 1e-9) cn = std::min(cn, ac.spring / vn);  // keep F_n >= 0
      double fn_est = std::max(0.0, ac.spring - cn * vn);
      double ct = std::min(cp.tangent_damping,
                           cp.friction * fn_est /
                               std::max(v_est.head<2>().norm(), cp.slip_eps));
      if (pass > 0) {
        cn = mix * cn + (1.0 - mix) * ac.Cpt(2, 2);
        ct = mix * ct + (1.0 - mix) * ac.Cpt(0, 0);
      }
      cap_shift = std::max({cap_shift, std::abs(cn - ac.Cpt(2, 2)) / (1.0 + cn),
                            std::abs(ct - ac.Cpt(0, 0)) / (1.0 + ct)});
      ac.Cpt = Mat3::Zero();
      ac.Cpt(0, 0) = ct;
      ac.Cpt(1, 1) = ct;
      ac.Cpt(2, 2) = cn;
      MatX JtC = ac.J.transpose() * ac.Cpt;  // nv x 3
      ws_.A.noalias() += dt * (JtC * ac.J);
      ws_.rhs.noalias() += ac.J.transpose() * Vec3(0, 0, ac.spring);
      ws_.rhs.noalias() -= JtC * (ac.J * u);
    }
    if (pass > 0 && cap_shift < 1e-9) break;
    udot = ws_.A.ldlt().solve(ws_.rhs);
    u_est = u + dt * udot;
  }
  const VecX u_new = u_est;

  // Contact forces at the post-solve velocity (used for C_i, diagnostics).
  std::vector<ContactForce> forces;
  forces.reserve(active.size());
  std::vector<uint8_t> raw_foot(model_.foot_points.size(), 0);
  for (const auto& ac : active) {
    Vec3 v_new = ac.J * u_new;
    Vec3 f = Vec3(0, 0, ac.spring) - ac.Cpt * v_new;
    forces.push_back({ac.point, ac.pos, f});
    const Model::Point& pt = model_.points[static_cast<size_t>(ac.point)];
    if (pt.is_foot && f.z() > cp.force_threshold)
      raw_foot[static_cast<size_t>(ac.point)] = 1;  // feet occupy the first point slots
  }

  if (params_.collect_diagnostics) fill_diagnostics(state, udot, forces);

  // Semi-implicit: positions advance with the new velocities.
  if (model_.floating_base) {
    state.base_vel = u_new.head<6>();
    state.base_pos += dt * (state.base_quat * lin_part(state.base_vel));
    state.base_quat = quat_integrate(state.base_quat, ang_part(state.base_vel), dt);
  }
  state.qd = u_new.tail(nq);
  state.q += dt * state.qd;
  state.time += dt;

  // Debounce filter for C_i: majority over the window, ties hold the
  // previous filtered value.
  const int W = std::max(1, cp.filter_window);
  const int nf = static_cast<int>(model_.foot_points.size());
  for (int f = 0; f < nf; ++f)
    state.contact_window[static_cast<size_t>(state.window_cursor * nf + f)] = raw_foot[static_cast<size_t>(f)];
  state.window_cursor = (state.window_cursor + 1) % W;
  for (int f = 0; f < nf; ++f) {
    int count = 0;
    for (int w = 0; w < W; ++w) count += state.contact_window[static_cast<size_t>(w * nf + f)];
    if (2 * count > W)
      state.foot_contact[static_cast<size_t>(f)] = 1;
    else if (2 * count < W)
      state.foot_contact[static_cast<size_t>(f)] = 0;
  }

  // Refresh cached foot kinematics at the new configuration.
  compute_kinematics(state);
  for (int f = 0; f < nf; ++f) {
    Vec3 pos_w, vel_w;
    point_state(model_.foot_points[static_cast<size_t>(f)], pos_w, vel_w);
    state.foot_pos.col(f) = pos_w;
    state.foot_vel.col(f) = vel_w;
  }

  if (!state.finite()) throw SimulationError("non-finite state after step (integration error)");
}

VecX World::forward_dynamics(const SimState& state, const VecX& joint_torques) const {
  compute_kinematics(state);
  mass_matrix(ws_.H);
  bias_forces(state, ws_.C);
  const int nv = model_.nv();
  const int off = model_.floating_base ? 6 : 0;
  VecX u(nv);
  if (model_.floating_base) u.head<6>() = state.base_vel;
  u.tail(model_.nq()) = state.qd;
  VecX rhs = -ws_.C;
  rhs.tail(model_.nq()) += applied_joint_torques(state, joint_torques);
  for (int j = 0; j < model_.nq(); ++j)
    rhs[off + j] -= model_.damping[static_cast<size_t>(j)] * state.qd[j];
  if (params_.contacts_enabled) {
    MatX J(3, nv);
    for (int p = 0; p < static_cast<int>(model_.points.size()); ++p) {
      Vec3 pos_w, vel_w;
      point_state(p, pos_w, vel_w);
      double phi = pos_w.z() - terrain_.height_at(pos_w.x(), pos_w.y());
      if (phi >= 0.0) continue;
      const ContactParams& cp = params_.contact;
      double fn = std::max(0.0, cp.stiffness * (-phi) - cp.damping * vel_w.z());
      Vec2 vt(vel_w.x(), vel_w.y());
      double ft = std::min(cp.tangent_damping * vt.norm(), cp.friction * fn);
      Vec3 f(0, 0, fn);
      if (vt.norm() > 1e-12) f.head<2>() = -ft * vt / vt.norm();
      point_jacobian(p, pos_w, J);
      rhs.noalias() += J.transpose() * f;
    }
  }
  return ws_.H.ldlt().solve(rhs);
}

std::vector<World::FootObs> World::foot_kinematics(const SimState& state) const {
  compute_kinematics(state);
  std::vector<FootObs> out(model_.foot_points.size());
  for (size_t f = 0; f < model_.foot_points.size(); ++f) {
    Vec3 pos_w, vel_w;
    point_state(model_.foot_points[f], pos_w, vel_w);
    FootObs& o = out[f];
    o.height = pos_w.z() - terrain_.height_at(pos_w.x(), pos_w.y());
    o.plane_vel = vel_w.head<2>();
    o.contact = state.foot_contact[f] != 0;
  }
  return out;
}

Xform World::body_pose(const SimState& state, int body) const {
  compute_kinematics(state);
  return ws_.world[static_cast<size_t>(body)];
}

Vec3 World::point_position(const SimState& state, int point) const {
  compute_kinematics(state);
  Vec3 pos_w, vel_w;
  point_state(point, pos_w, vel_w);
  return pos_w;
}

double World::total_energy(const SimState& state) const {
  compute_kinematics(state);
  double e = 0.0;
  for (int i = 0; i < model_.nbodies(); ++i) {
    const SpatialInertia& I = model_.bodies[static_cast<size_t>(i)].inertia;
    const Vec6& v = ws_.vel[static_cast<size_t>(i)];
    e += 0.5 * v.dot(I.times(v));
    if (I.mass > 0) {
      Vec3 com_w = ws_.world[static_cast<size_t>(i)].apply_point(I.h / I.mass);
      e += I.mass * params_.gravity * com_w.z();
    }
  }
  for (int j = 0; j < model_.nq(); ++j)
    e += 0.5 * model_.armature[static_cast<size_t>(j)] * state.qd[j] * state.qd[j];
  return e;
}

Vec6 World::total_momentum(const SimState& state) const {
  compute_kinematics(state);
  Vec3 lin = Vec3::Zero(), ang = Vec3::Zero();
  for (int i = 0; i < model_.nbodies(); ++i) {
    const SpatialInertia& I = model_.bodies[static_cast<size_t>(i)].inertia;
    const Vec6& v = ws_.vel[static_cast<size_t>(i)];
    Vec6 mom = I.times(v);  // [ang about body origin; lin], body frame
    const Xform& X = ws_.world[static_cast<size_t>(i)];
    Vec3 lin_w = X.rot * lin_part(mom);
    ang += X.rot * ang_part(mom) + X.pos.cross(lin_w);
    lin += lin_w;
  }
  return spatial(ang, lin);
}

void World::fill_diagnostics(const SimState& state, const VecX& udot,
                             const std::vector<ContactForce>& contacts) const {
  const int nb = model_.nbodies();
  const int off = model_.floating_base ? 6 : 0;
  std::vector<Vec6> acc(static_cast<size_t>(nb));
  acc[0] = model_.floating_base ? Vec6(udot.head<6>()) : Vec6::Zero();
  for (int i = 1; i < nb; ++i) {
    const Model::Body& b = model_.bodies[static_cast<size_t>(i)];
    Vec6 a = ws_.local[static_cast<size_t>(i)].motion_to_child(acc[static_cast<size_t>(b.parent)]);
    if (b.dof >= 0) {
      Vec6 vj = spatial(b.joint_axis * state.qd[b.dof], Vec3::Zero());
      a += spatial(b.joint_axis * udot[off + b.dof], Vec3::Zero());
      a += cross_motion(ws_.vel[static_cast<size_t>(i)], vj);
    }
    acc[static_cast<size_t>(i)] = a;
  }
  // d/dt of world-frame momentum, per body: all body-frame quantities have
  // componentwise derivatives equal to the spatial acceleration components.
  Vec3 pdot = Vec3::Zero(), ldot = Vec3::Zero();
  Vec3 grav_force = Vec3::Zero(), grav_torque = Vec3::Zero();
  Vec3 g_vec(0, 0, -params_.gravity);
  for (int i = 0; i < nb; ++i) {
    const SpatialInertia& I = model_.bodies[static_cast<size_t>(i)].inertia;
    const Xform& X = ws_.world[static_cast<size_t>(i)];
    const Vec6& v = ws_.vel[static_cast<size_t>(i)];
    Vec3 w = ang_part(v), vl = lin_part(v);
    Vec3 wd = ang_part(acc[static_cast<size_t>(i)]), vd = lin_part(acc[static_cast<size_t>(i)]);
    Vec3 lin_b = I.mass * vl - I.h.cross(w);
    Vec3 ang_b = I.moment * w + I.h.cross(vl);
    Vec3 lin_b_dot = I.mass * vd - I.h.cross(wd);
    Vec3 ang_b_dot = I.moment * wd + I.h.cross(vd);
    Vec3 dlin_w = X.rot * (lin_b_dot + w.cross(lin_b));
    pdot += dlin_w;
    ldot += X.rot * (ang_b_dot + w.cross(ang_b)) + (X.rot * vl).cross(X.rot * lin_b) +
            X.pos.cross(dlin_w);
    if (I.mass > 0) {
      Vec3 com_w = X.apply_point(I.h / I.mass);
      grav_force += I.mass * g_vec;
      grav_torque += com_w.cross(I.mass * g_vec);
    }
  }
  Vec3 ext_f = grav_force, ext_t = grav_torque;
  for (const auto& c : contacts) {
    ext_f += c.force;
    ext_t += c.position.cross(c.force);
  }
  diag_.momentum_rate = spatial(ldot, pdot);
  diag_.external_wrench = spatial(ext_t, ext_f);
  diag_.contacts = contacts;
}

void apply_push(SimState& state, const Vec2& delta_v) {
  if (!delta_v.allFinite()) throw SimulationError("non-finite push");
  Vec3 dv_world(delta_v.x(), delta_v.y(), 0.0);
  Vec3 dv_body = state.base_quat.conjugate() * dv_world;
  state.base_vel.tail<3>() += dv_body;
}

}  // namespace solo9
