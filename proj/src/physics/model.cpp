#include "solo9/physics/model.hpp"

namespace solo9 {

Model Model::compile(const RobotSpec& spec) {
  spec.validate();
  Model m;
  m.floating_base = spec.floating_base;
  m.total_mass = spec.total_mass;
  m.bodies.resize(spec.links.size());
  for (size_t i = 0; i < spec.links.size(); ++i) {
    const LinkSpec& link = spec.links[i];
    Body& b = m.bodies[i];
    b.name = link.name;
    b.inertia = SpatialInertia::from_link(link.mass, link.com, link.inertia_diag);
  }
  for (const JointSpec& j : spec.joints) {
    Body& b = m.bodies[j.child];
    b.parent = j.parent;
    b.joint_type = j.type;
    b.joint_axis = j.axis;
    b.joint_origin = j.origin;
    b.fixed_angle = j.type == JointType::fixed ? j.default_position : 0.0;
    if (j.actuated()) {
      b.dof = m.nq();
      m.damping.push_back(j.damping);
      m.armature.push_back(j.armature);
      m.torque_limit.push_back(j.torque_limit);
      m.default_q.push_back(j.default_position);
      m.position_limits.push_back(j.position_limits
                                      ? *j.position_limits
                                      : Vec2(std::nan(""), std::nan("")));
    }
  }
  // Feet first so that foot index f is also points[f].
  for (size_t i = 0; i < spec.links.size(); ++i)
    for (const auto& cp : spec.links[i].collision_points)
      if (cp.is_foot) {
        m.foot_points.push_back(static_cast<int>(m.points.size()));
        m.points.push_back({cp.name, static_cast<int>(i), cp.offset, true});
      }
  for (size_t i = 0; i < spec.links.size(); ++i)
    for (const auto& cp : spec.links[i].collision_points)
      if (!cp.is_foot) m.points.push_back({cp.name, static_cast<int>(i), cp.offset, false});
  return m;
}

SimState SimState::init(const Model& model, int filter_window) {
  SimState s;
  s.q = VecX::Zero(model.nq());
  s.qd = VecX::Zero(model.nq());
  for (int i = 0; i < model.nq(); ++i) s.q[i] = model.default_q[static_cast<size_t>(i)];
  int nf = static_cast<int>(model.foot_points.size());
  s.foot_contact.assign(static_cast<size_t>(nf), 0);
  s.contact_window.assign(static_cast<size_t>(nf) * std::max(1, filter_window), 0);
  s.foot_pos = MatX::Zero(3, nf);
  s.foot_vel = MatX::Zero(3, nf);
  return s;
}

}  // namespace solo9
