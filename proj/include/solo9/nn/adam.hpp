#pragma once

#include "solo9/nn/mlp.hpp"

namespace solo9 {

struct AdamHyper {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moment accumulators with bias correction; update rule
/// p -= lr * m_hat / (sqrt(v_hat) + eps). Shapes mirror the network.
struct AdamState {
  std::vector<MatX> mW, vW;
  std::vector<VecX> mb, vb;
  long step = 0;

  static AdamState init(const Mlp& net) {
    AdamState s;
    for (const auto& l : net.layers) {
      s.mW.emplace_back(MatX::Zero(l.W.rows(), l.W.cols()));
      s.vW.emplace_back(MatX::Zero(l.W.rows(), l.W.cols()));
      s.mb.emplace_back(VecX::Zero(l.b.size()));
      s.vb.emplace_back(VecX::Zero(l.b.size()));
    }
    return s;
  }
};

namespace detail {
template <typename T>
void adam_update(T& p, const T& g, T& m, T& v, long step, const AdamHyper& h) {
  m = h.beta1 * m + (1.0 - h.beta1) * g;
  v = h.beta2 * v + (1.0 - h.beta2) * g.cwiseProduct(g);
  double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(step));
  double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(step));
  p -= (h.lr / c1) *
       m.cwiseQuotient(((v / c2).cwiseSqrt().array() + h.eps).matrix());
}
}  // namespace detail

/// Throws on non-finite gradients before touching the parameters.
inline void adam_step(Mlp& net, const Grads& grads, AdamState& state, const AdamHyper& hyper) {
  if (!grads.finite()) throw ValidationError("non-finite gradients in optimizer step");
  ++state.step;
  for (size_t l = 0; l < net.layers.size(); ++l) {
    detail::adam_update(net.layers[l].W, grads.dW[l], state.mW[l], state.vW[l], state.step, hyper);
    detail::adam_update(net.layers[l].b, grads.db[l], state.mb[l], state.vb[l], state.step, hyper);
  }
}

/// Same update for a flat parameter vector (e.g. the policy log-std).
struct AdamVecState {
  VecX m, v;
  long step = 0;
  static AdamVecState init(int n) { return {VecX::Zero(n), VecX::Zero(n), 0}; }
};

inline void adam_step(VecX& params, const VecX& grads, AdamVecState& state,
                      const AdamHyper& hyper) {
  if (!grads.allFinite()) throw ValidationError("non-finite gradients in optimizer step");
  ++state.step;
  detail::adam_update(params, grads, state.m, state.v, state.step, hyper);
}

}  // namespace solo9
