#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "solo9/core/types.hpp"

namespace solo9 {

/// One reference-motion frame. Channel order (the canonical dataset order):
/// base position (3), base quaternion (4, w x y z), base linear velocity (3,
/// world), base angular velocity (3, world), base normal vector (3, the body
/// up-axis in world), base height (1, above local ground), joint positions
/// (dof), joint velocities (dof).
struct FrameRecord {
  Vec3 base_pos = Vec3::Zero();
  Vec4 base_quat = Vec4(1, 0, 0, 0);  // w x y z
  Vec3 lin_vel = Vec3::Zero();
  Vec3 ang_vel = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double height = 0.0;
  VecX q, qd;

  int dof() const { return static_cast<int>(q.size()); }
  int channels() const { return 17 + 2 * dof(); }
  VecX flatten() const;
  static FrameRecord unflatten(const Eigen::Ref<const VecX>& row, int dof);
  /// Quaternion/normal unit norm and normal == quat-rotated world up, 1e-6.
  void validate() const;
};

struct DatasetMeta {
  double dt = 0.02;
  int dof = 9;
  std::string gait = "unknown";
  int iteration = 0;  // 0 is reserved for the zero-waist-augmented origin
  std::string provenance;
  uint64_t parent_hash = 0;
};

struct MotionClip {
  std::string label;
  std::vector<FrameRecord> frames;
};

/// Immutable after load; window sampling is seeded by the caller and safe for
/// concurrent reads.
struct MotionDataset {
  DatasetMeta meta;
  std::vector<MotionClip> clips;

  size_t total_frames() const;
  void validate() const;
};

std::vector<std::string> frame_channel_names(int dof);

/// Inserts all-zero waist position/velocity channels at `waist_index` within
/// the joint blocks; every original channel is bit-identical. The result is
/// iteration 0, the origin dataset.
MotionDataset augment_zero_waist(const MotionDataset& ds, int waist_index = 0);

/// Exact inverse of augment_zero_waist (drops the waist channels).
MotionDataset remove_waist(const MotionDataset& ds, int waist_index = 0);

/// The 27 discriminator inputs: linear velocity (3), roll and pitch rates
/// (2, yaw rate omitted), base normal (3), base height (1), joint positions
/// (9), joint velocities (9). Base position is never included.
VecX extract_discriminator_obs(const FrameRecord& frame);
inline constexpr int kDiscriminatorObsDim = 27;

/// `batch` windows of `window` consecutive frames each, flattened
/// oldest-frame-first into (27*window) x batch. Uniform over all valid
/// (clip, start) pairs; deterministic per seed.
MatX sample_windows(const MotionDataset& ds, int batch, int window, uint64_t seed);

void write_dataset(const MotionDataset& ds, const std::string& path, bool binary);
MotionDataset read_dataset(const std::string& path);
/// Content hash over the canonical binary serialization (FNV-1a 64).
uint64_t dataset_hash(const MotionDataset& ds);

/// One logged episode offered for dataset export.
struct RolloutLog {
  std::vector<FrameRecord> frames;
  bool fell = false;
  double tracking_error = 0.0;  // mean |yaw rate - command|, rad/s
};

/// Builds the next-iteration dataset from surviving rollouts. Episodes that
/// fell or miss the tracking gate (gate <= 0 disables it) are dropped;
/// an empty eligible set is an error.
MotionDataset export_rollouts(const std::vector<RolloutLog>& rollouts, const DatasetMeta& parent,
                              double dt, const std::string& provenance,
                              double tracking_gate = 0.0);

}  // namespace solo9
