#pragma once

#include "solo9/dataset/motion_dataset.hpp"

namespace solo9 {

/// Hand-made 8-dof trot clip used as the test and demo reference gait.
/// Diagonal leg pairs move in antiphase; base translates forward with a small
/// height bob. Velocities are the analytic derivatives of the positions, so
/// the frames are internally consistent.
MotionDataset make_fixture_gait(int frames_per_clip = 120, double dt = 0.02,
                                double forward_speed = 0.3);

}  // namespace solo9
