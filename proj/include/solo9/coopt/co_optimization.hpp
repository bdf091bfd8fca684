#pragma once

#include "solo9/coopt/trainer.hpp"

namespace solo9 {

struct IterationStep {
  double w_imitation = 0.5;
  int updates = 100;
  int export_episodes = 8;
  double export_horizon = 6.0;   // s
  double tracking_gate = 0.0;    // rad/s mean yaw error; <= 0 disables
  Vec2 cmd_lin = Vec2(0.0, 1.0);
  Vec2 cmd_ang = Vec2(-0.5, 0.5);
  std::vector<std::string> gait_allowlist;
};

/// The outer loop schedule: the imitation weight must be non-decreasing
/// across iterations.
struct IterationPlan {
  std::vector<IterationStep> steps;
  std::string robot_path;
  std::string config_path;
  std::string dataset_path;
  bool warm_start = true;  // carry policy parameters across iterations

  void validate() const;
  static IterationPlan load(const std::string& path);
};

struct IterationReport {
  int iteration = 0;
  double w_imitation = 0.0;
  double survival_rate = 0.0;       // of the export episodes
  double mean_tracking_error = 0.0; // rad/s
  double mean_imitation_reward = 0.0;
  uint64_t dataset_hash_value = 0;
  int exported_clips = 0;
  std::string to_text() const;
};

/// Trains against dataset_in, then harvests surviving rollouts as the next
/// dataset. With export_episodes == 0 the dataset passes through unchanged.
IterationReport run_iteration(Trainer& trainer, const IterationStep& step,
                              const MotionDataset& dataset_in, MotionDataset& dataset_out);

struct PlanResult {
  std::vector<IterationReport> reports;
  std::vector<uint64_t> lineage;  // dataset hash per iteration, origin first
  std::string out_dir;
};

/// Sequential iterations with the full lineage persisted under out_dir
/// (datasets/, checkpoints/, reports/). Deterministic per seed at a fixed
/// thread count. On iteration failure the lineage written so far stays on
/// disk and the error propagates.
PlanResult run_plan(const IterationPlan& plan, const MotionDataset& origin, uint64_t seed,
                    const std::string& out_dir);

}  // namespace solo9
