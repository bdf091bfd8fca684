#pragma once

#include <deque>

#include "solo9/nn/adam.hpp"
#include "solo9/nn/normalizer.hpp"

namespace solo9 {

enum class ImitationRewardMap {
  lsgan_bounded,  // max(0, 1 - 0.25 (D - 1)^2), in [0, 1]
  classic_gail,   // -log(1 - sigmoid(D))
};

struct DiscriminatorConfig {
  int window = 2;            // frames per input
  double lambda_gp = 10.0;   // gradient penalty on expert samples
  std::vector<int> hidden = {256, 128};
  ImitationRewardMap reward_map = ImitationRewardMap::lsgan_bounded;
};

/// Least-squares adversarial critic over flattened imitation windows.
/// Expert label +1, policy label -1; inputs are normalized by running
/// statistics shared between both sides.
class Discriminator {
 public:
  Discriminator(int obs_dim, const DiscriminatorConfig& cfg, Rng& rng);

  int obs_dim() const { return obs_dim_; }
  int window() const { return cfg_.window; }
  int input_dim() const { return obs_dim_ * cfg_.window; }

  double value(const Eigen::Ref<const VecX>& window_flat) const;
  VecX value_batch(const MatX& windows) const;

  /// Bounded imitation reward in [0, 1] under the default map.
  double imitation_reward(const Eigen::Ref<const VecX>& window_flat) const;

  void update_normalizer(const MatX& batch) { normalizer_.update(batch); }

  struct LossInfo {
    double total = 0.0;
    double expert_term = 0.0;
    double policy_term = 0.0;
    double gp_term = 0.0;  // unweighted mean squared input-gradient norm
  };

  /// L = E_expert[(D-1)^2] + E_policy[(D+1)^2] + lambda_gp E_expert[|dD/dx|^2].
  LossInfo loss_and_grads(const MatX& expert, const MatX& policy, Grads& grads) const;

  /// One optimizer step on the loss; updates the normalizer first.
  LossInfo update(const MatX& expert, const MatX& policy);

  /// Mean input-gradient norm over a batch (diagnostics for the penalty).
  double mean_input_gradient_norm(const MatX& windows) const;

  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }
  RunningNormalizer& normalizer() { return normalizer_; }
  const RunningNormalizer& normalizer() const { return normalizer_; }
  AdamState& optimizer_state() { return adam_; }
  AdamHyper& hyper() { return hyper_; }
  const DiscriminatorConfig& config() const { return cfg_; }

 private:
  int obs_dim_;
  DiscriminatorConfig cfg_;
  Mlp net_;
  RunningNormalizer normalizer_;
  AdamState adam_;
  AdamHyper hyper_;
};

/// Ring buffer of recent policy windows feeding the discriminator updates.
class WindowReplay {
 public:
  explicit WindowReplay(size_t capacity = 100000) : capacity_(capacity) {}
  void push(const VecX& window);
  size_t size() const { return buffer_.size(); }
  /// Uniform sample with replacement.
  MatX sample(int n, Rng& rng) const;

 private:
  size_t capacity_;
  std::deque<VecX> buffer_;
};

}  // namespace solo9
