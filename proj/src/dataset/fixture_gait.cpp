#include "solo9/dataset/fixture_gait.hpp"

#include <cmath>

namespace solo9 {

MotionDataset make_fixture_gait(int frames_per_clip, double dt, double forward_speed) {
  MotionDataset ds;
  ds.meta.dt = dt;
  ds.meta.dof = 8;
  ds.meta.gait = "trot";
  ds.meta.iteration = 0;
  ds.meta.provenance = "hand-made fixture trot";

  // Joint order: fl_hip, fl_knee, fr_hip, fr_knee, hl_hip, hl_knee, hr_hip,
  // hr_knee. Trot: fl+hr in phase, fr+hl in antiphase.
  const double default_q[8] = {0.8, -1.6, 0.8, -1.6, -0.8, 1.6, -0.8, 1.6};
  const double leg_phase[4] = {0.0, M_PI, M_PI, 0.0};  // fl, fr, hl, hr
  const double hip_amp = 0.22, knee_amp = 0.30;
  const double freq = 2.0;  // Hz
  const double omega = 2 * M_PI * freq;
  const double base_h = 0.21, bob = 0.004;

  MotionClip clip;
  clip.label = "trot";
  for (int t = 0; t < frames_per_clip; ++t) {
    double time = t * dt;
    FrameRecord f;
    f.q = VecX(8);
    f.qd = VecX(8);
    for (int leg = 0; leg < 4; ++leg) {
      double ph = omega * time + leg_phase[leg];
      // Rear legs mirror the front pose, so their swing flips sign.
      double dir = leg < 2 ? 1.0 : -1.0;
      f.q[2 * leg] = default_q[2 * leg] - dir * hip_amp * std::sin(ph);
      f.qd[2 * leg] = -dir * hip_amp * omega * std::cos(ph);
      // Knee flexes a quarter period ahead of the hip (smooth everywhere).
      f.q[2 * leg + 1] = default_q[2 * leg + 1] + dir * knee_amp * std::sin(ph + M_PI_2);
      f.qd[2 * leg + 1] = dir * knee_amp * omega * std::cos(ph + M_PI_2);
    }
    double bob_ph = 2 * omega * time;
    f.base_pos = Vec3(forward_speed * time, 0.0, base_h + bob * std::sin(bob_ph));
    f.base_quat = Vec4(1, 0, 0, 0);
    f.lin_vel = Vec3(forward_speed, 0.0, bob * 2 * omega * std::cos(bob_ph));
    f.ang_vel = Vec3::Zero();
    f.normal = Vec3::UnitZ();
    f.height = f.base_pos.z();
    clip.frames.push_back(std::move(f));
  }
  ds.clips.push_back(std::move(clip));
  return ds;
}

}  // namespace solo9
