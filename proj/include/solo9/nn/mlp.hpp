#pragma once

#include <vector>

#include "solo9/core/rng.hpp"
#include "solo9/core/types.hpp"

namespace solo9 {

enum class Activation { identity, tanh_act, relu, elu };

/// Multilayer perceptron parameters. Columns are batch samples throughout.
template <typename Scalar>
struct MlpT {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Layer {
    Mat W;
    Vec b;
    Activation act = Activation::identity;
  };
  std::vector<Layer> layers;

  int input_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().W.cols()); }
  int output_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.back().W.rows()); }

  long param_count() const {
    long n = 0;
    for (const auto& l : layers) n += l.W.size() + l.b.size();
    return n;
  }

  bool finite() const {
    for (const auto& l : layers)
      if (!l.W.allFinite() || !l.b.allFinite()) return false;
    return true;
  }

  /// He/Xavier-style scaled uniform init; output layer gets a smaller scale
  /// to start near zero.
  static MlpT make(int in, const std::vector<int>& hidden, int out, Activation hidden_act,
                   Rng& rng, double out_scale = 0.01) {
    MlpT net;
    int prev = in;
    for (int h : hidden) {
      Layer l;
      l.W = Mat(h, prev);
      double s = std::sqrt(2.0 / prev);
      for (long i = 0; i < l.W.size(); ++i)
        l.W.data()[i] = static_cast<Scalar>(rng.uniform(-s, s));
      l.b = Vec::Zero(h);
      l.act = hidden_act;
      net.layers.push_back(std::move(l));
      prev = h;
    }
    Layer last;
    last.W = Mat(out, prev);
    double s = out_scale * std::sqrt(2.0 / prev);
    for (long i = 0; i < last.W.size(); ++i)
      last.W.data()[i] = static_cast<Scalar>(rng.uniform(-s, s));
    last.b = Vec::Zero(out);
    last.act = Activation::identity;
    net.layers.push_back(std::move(last));
    return net;
  }
};

/// Recorded forward pass of one batch; consumed exactly once by backward.
template <typename Scalar>
struct TapeT {
  using Mat = typename MlpT<Scalar>::Mat;
  std::vector<Mat> inputs;   // x_{l-1} per layer
  std::vector<Mat> preacts;  // z_l per layer
  bool used = false;
};

/// Parameter gradients mirroring the layer shapes, plus the input gradient.
template <typename Scalar>
struct GradsT {
  using Mat = typename MlpT<Scalar>::Mat;
  using Vec = typename MlpT<Scalar>::Vec;
  std::vector<Mat> dW;
  std::vector<Vec> db;
  Mat dx;

  static GradsT zeros_like(const MlpT<Scalar>& net) {
    GradsT g;
    for (const auto& l : net.layers) {
      g.dW.emplace_back(Mat::Zero(l.W.rows(), l.W.cols()));
      g.db.emplace_back(Vec::Zero(l.b.size()));
    }
    return g;
  }

  void add_scaled(const GradsT& o, Scalar s) {
    for (size_t l = 0; l < dW.size(); ++l) {
      dW[l] += s * o.dW[l];
      db[l] += s * o.db[l];
    }
  }

  bool finite() const {
    for (size_t l = 0; l < dW.size(); ++l)
      if (!dW[l].allFinite() || !db[l].allFinite()) return false;
    return true;
  }
};

using Mlp = MlpT<double>;
using Tape = TapeT<double>;
using Grads = GradsT<double>;

template <typename Scalar>
typename MlpT<Scalar>::Mat activate(const typename MlpT<Scalar>::Mat& z, Activation a);
template <typename Scalar>
typename MlpT<Scalar>::Mat activate_grad(const typename MlpT<Scalar>::Mat& z, Activation a);
template <typename Scalar>
typename MlpT<Scalar>::Mat activate_grad2(const typename MlpT<Scalar>::Mat& z, Activation a);

/// Affine + activation composition over a batch. Records a tape when given.
template <typename Scalar>
typename MlpT<Scalar>::Mat forward(const MlpT<Scalar>& net, const typename MlpT<Scalar>::Mat& x,
                                   TapeT<Scalar>* tape = nullptr);

/// Exact reverse-mode gradients of <dy, y> for all parameters and the input.
/// The tape is single-use; reuse is an error.
template <typename Scalar>
GradsT<Scalar> backward(const MlpT<Scalar>& net, TapeT<Scalar>& tape,
                        const typename MlpT<Scalar>::Mat& dy);

/// d output / d input per batch column, for scalar-output nets.
template <typename Scalar>
typename MlpT<Scalar>::Mat input_gradient(const MlpT<Scalar>& net,
                                          const typename MlpT<Scalar>::Mat& x);

/// ||dD/dx||_2 for a single input.
template <typename Scalar>
double input_gradient_norm(const MlpT<Scalar>& net, const typename MlpT<Scalar>::Vec& x);

/// Mean over the batch of ||dD/dx||^2 together with its exact parameter
/// gradients (forward-over-reverse, needs twice-differentiable activations).
template <typename Scalar>
double gradient_penalty(const MlpT<Scalar>& net, const typename MlpT<Scalar>::Mat& x,
                        GradsT<Scalar>& grads_out);

}  // namespace solo9
