#pragma once

#include "solo9/core/types.hpp"

namespace solo9 {

/// 6D spatial vectors, [angular; linear] blocks, body-local coordinates.
/// Motion vectors hold (omega, v-of-point-at-origin); force vectors hold
/// (torque-about-origin, force).

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

inline Vec6 spatial(const Vec3& ang, const Vec3& lin) {
  Vec6 s;
  s << ang, lin;
  return s;
}

inline Vec3 ang_part(const Vec6& s) { return s.head<3>(); }
inline Vec3 lin_part(const Vec6& s) { return s.tail<3>(); }

/// Motion-cross-motion: vx m.
inline Vec6 cross_motion(const Vec6& v, const Vec6& m) {
  Vec3 w = ang_part(v), u = lin_part(v);
  return spatial(w.cross(ang_part(m)), w.cross(lin_part(m)) + u.cross(ang_part(m)));
}

/// Motion-cross-force: vx* f.
inline Vec6 cross_force(const Vec6& v, const Vec6& f) {
  Vec3 w = ang_part(v), u = lin_part(v);
  return spatial(w.cross(ang_part(f)) + u.cross(lin_part(f)), w.cross(lin_part(f)));
}

/// Pose of a child frame inside a parent frame: `rot` maps child coordinates
/// to parent coordinates, `pos` is the child origin in parent coordinates.
struct Xform {
  Mat3 rot = Mat3::Identity();
  Vec3 pos = Vec3::Zero();

  static Xform identity() { return {}; }

  /// Composition: pose of B-in-A applied to pose of C-in-B gives C-in-A.
  Xform operator*(const Xform& child) const {
    return {rot * child.rot, pos + rot * child.pos};
  }

  Vec3 apply_point(const Vec3& p_child) const { return pos + rot * p_child; }
  Vec3 inv_point(const Vec3& p_parent) const { return rot.transpose() * (p_parent - pos); }

  Vec6 motion_to_child(const Vec6& m_parent) const {
    Vec3 w = ang_part(m_parent);
    return spatial(rot.transpose() * w,
                   rot.transpose() * (lin_part(m_parent) + w.cross(pos)));
  }
  Vec6 motion_to_parent(const Vec6& m_child) const {
    Vec3 w = rot * ang_part(m_child);
    return spatial(w, rot * lin_part(m_child) - w.cross(pos));
  }
  Vec6 force_to_parent(const Vec6& f_child) const {
    Vec3 f = rot * lin_part(f_child);
    return spatial(rot * ang_part(f_child) + pos.cross(f), f);
  }
  Vec6 force_to_child(const Vec6& f_parent) const {
    Vec3 f = lin_part(f_parent);
    return spatial(rot.transpose() * (ang_part(f_parent) - pos.cross(f)),
                   rot.transpose() * f);
  }

  /// 6x6 motion-transform matrix (child <- parent), test oracle form.
  Mat6 motion_matrix_to_child() const {
    Mat6 X = Mat6::Zero();
    Mat3 Rt = rot.transpose();
    X.topLeftCorner<3, 3>() = Rt;
    X.bottomRightCorner<3, 3>() = Rt;
    X.bottomLeftCorner<3, 3>() = Rt * skew(pos).transpose();
    return X;
  }
};

/// Spatial inertia stored as (mass, h = m*com, I about the frame origin).
struct SpatialInertia {
  double mass = 0.0;
  Vec3 h = Vec3::Zero();
  Mat3 moment = Mat3::Zero();

  static SpatialInertia from_link(double m, const Vec3& com, const Vec3& inertia_diag_at_com) {
    SpatialInertia si;
    si.mass = m;
    si.h = m * com;
    Mat3 icom = inertia_diag_at_com.asDiagonal();
    si.moment = icom + m * (com.squaredNorm() * Mat3::Identity() - com * com.transpose());
    return si;
  }

  Vec6 times(const Vec6& motion) const {
    Vec3 w = ang_part(motion), v = lin_part(motion);
    return spatial(moment * w + h.cross(v), mass * v - h.cross(w));
  }

  SpatialInertia& operator+=(const SpatialInertia& o) {
    mass += o.mass;
    h += o.h;
    moment += o.moment;
    return *this;
  }

  /// Re-expresses this inertia (given in a child frame) in the parent frame,
  /// where `pose` is the child's pose in the parent.
  SpatialInertia to_parent(const Xform& pose) const {
    SpatialInertia out;
    out.mass = mass;
    if (mass <= 0.0) return out;
    Vec3 c_child = h / mass;
    Mat3 icom = moment - mass * (c_child.squaredNorm() * Mat3::Identity() -
                                 c_child * c_child.transpose());
    Vec3 c_parent = pose.apply_point(c_child);
    out.h = mass * c_parent;
    Mat3 icom_p = pose.rot * icom * pose.rot.transpose();
    out.moment = icom_p + mass * (c_parent.squaredNorm() * Mat3::Identity() -
                                  c_parent * c_parent.transpose());
    return out;
  }

  /// Adds a point mass at `at` (frame coordinates).
  void add_point_mass(double dm, const Vec3& at) {
    mass += dm;
    h += dm * at;
    moment += dm * (at.squaredNorm() * Mat3::Identity() - at * at.transpose());
  }

  /// Moves the center of mass by `delta` keeping the mass and the inertia
  /// about the (moved) com.
  void shift_com(const Vec3& delta) {
    if (mass <= 0.0) return;
    Vec3 c_old = h / mass;
    Mat3 icom = moment - mass * (c_old.squaredNorm() * Mat3::Identity() -
                                 c_old * c_old.transpose());
    Vec3 c_new = c_old + delta;
    h = mass * c_new;
    moment = icom + mass * (c_new.squaredNorm() * Mat3::Identity() -
                            c_new * c_new.transpose());
  }

  /// 6x6 matrix form [[I, hx], [hx^T, m*Id]], test oracle form.
  Mat6 matrix() const {
    Mat6 M = Mat6::Zero();
    M.topLeftCorner<3, 3>() = moment;
    M.topRightCorner<3, 3>() = skew(h);
    M.bottomLeftCorner<3, 3>() = skew(h).transpose();
    M.bottomRightCorner<3, 3>() = mass * Mat3::Identity();
    return M;
  }
};

/// Quaternion step under a body-frame angular velocity.
inline Quat quat_integrate(const Quat& q, const Vec3& omega_body, double dt) {
  Vec3 half = 0.5 * dt * omega_body;
  double angle = half.norm();
  Quat dq;
  if (angle < 1e-12) {
    dq = Quat(1.0, half.x(), half.y(), half.z());
  } else {
    Vec3 axis = half / angle;
    double s = std::sin(angle);
    dq = Quat(std::cos(angle), s * axis.x(), s * axis.y(), s * axis.z());
  }
  Quat out = q * dq;
  out.normalize();
  return out;
}

}  // namespace solo9
