#pragma once

#include <fstream>
#include <memory>

#include "solo9/dataset/motion_dataset.hpp"
#include "solo9/env/quadruped_vec_env.hpp"
#include "solo9/rl/ppo.hpp"

namespace solo9 {

struct TrainerConfig {
  int n_envs = 16;
  int steps_per_update = 32;
  std::vector<int> policy_hidden = {256, 128};
  PpoHyper ppo;
  DiscriminatorConfig disc;
  int disc_batch = 64;
  int disc_steps_per_update = 1;
  size_t replay_capacity = 100000;

  static TrainerConfig from_config(const Config& cfg);
};

/// Per-update metric stream: append-only tab-separated log consumed by the
/// plot subcommand.
class MetricsLog {
 public:
  MetricsLog() = default;
  explicit MetricsLog(const std::string& path);
  void row(const std::vector<std::pair<std::string, double>>& values);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> out_;
  bool header_written_ = false;
};

/// One adversarial-imitation training context: policy, discriminator, replay,
/// vectorized envs, and the active reference dataset.
class Trainer {
 public:
  Trainer(const RobotSpec& spec, const EnvConfig& env_cfg, const TrainerConfig& cfg,
          uint64_t seed, const std::string& metrics_path = "");

  /// Swaps the reference dataset (validated as 9-dof).
  void set_dataset(MotionDataset ds);
  const MotionDataset& dataset() const { return dataset_; }

  /// Restricts expert sampling to the listed clip labels (empty = all).
  void set_gait_allowlist(const std::vector<std::string>& labels);

  /// Overrides the command sampling ranges of every env.
  void set_command_ranges(const Vec2& lin, const Vec2& ang);

  struct UpdateStats {
    PpoMetrics ppo;
    Discriminator::LossInfo disc;
    double mean_r_imitation = 0.0;
    double mean_r_task = 0.0;
    double mean_reward = 0.0;
  };
  UpdateStats update(double w_imitation);
  void train(int updates, double w_imitation);

  struct ExportedEpisode {
    RolloutLog log;
    double mean_imitation_reward = 0.0;
  };
  /// Runs mean-action episodes with commands drawn from the plan ranges and
  /// returns their frame logs (at the control rate) for dataset export.
  std::vector<ExportedEpisode> export_episodes(int n, double horizon_s);

  PolicyNet& policy() { return policy_; }
  const PolicyNet& policy() const { return policy_; }
  Discriminator& discriminator() { return *disc_; }
  QuadrupedVecEnv& envs() { return *venv_; }
  long updates_done() const { return updates_done_; }

  void save_checkpoint(const std::string& path) const;
  void load_checkpoint(const std::string& path);

 private:
  MotionDataset sampling_dataset() const;

  RobotSpec spec_;
  EnvConfig env_cfg_;
  TrainerConfig cfg_;
  Rng rng_;
  std::unique_ptr<QuadrupedVecEnv> venv_;
  PolicyNet policy_;
  PpoOptState opt_;
  std::unique_ptr<Discriminator> disc_;
  WindowReplay replay_;
  MotionDataset dataset_;
  std::vector<std::string> allowlist_;
  MetricsLog metrics_;
  long updates_done_ = 0;
  uint64_t window_seed_ = 0;
};

}  // namespace solo9
