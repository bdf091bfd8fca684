#include "solo9/nn/mlp.hpp"

namespace solo9 {

template <typename Scalar>
typename MlpT<Scalar>::Mat activate(const typename MlpT<Scalar>::Mat& z, Activation a) {
  using Mat = typename MlpT<Scalar>::Mat;
  switch (a) {
    case Activation::identity: return z;
    case Activation::tanh_act: return z.array().tanh().matrix();
    case Activation::relu: return z.cwiseMax(Scalar(0));
    case Activation::elu:
      return Mat((z.array() > 0).select(z.array(), z.array().exp() - 1));
  }
  return z;
}

template <typename Scalar>
typename MlpT<Scalar>::Mat activate_grad(const typename MlpT<Scalar>::Mat& z, Activation a) {
  using Mat = typename MlpT<Scalar>::Mat;
  switch (a) {
    case Activation::identity: return Mat::Ones(z.rows(), z.cols());
    case Activation::tanh_act: {
      Mat t = z.array().tanh().matrix();
      return (1 - t.array().square()).matrix();
    }
    case Activation::relu:
      return Mat((z.array() > 0).select(Mat::Ones(z.rows(), z.cols()).array(), Scalar(0)));
    case Activation::elu:
      return Mat((z.array() > 0).select(Mat::Ones(z.rows(), z.cols()).array(), z.array().exp()));
  }
  return Mat::Ones(z.rows(), z.cols());
}

template <typename Scalar>
typename MlpT<Scalar>::Mat activate_grad2(const typename MlpT<Scalar>::Mat& z, Activation a) {
  using Mat = typename MlpT<Scalar>::Mat;
  switch (a) {
    case Activation::identity:
    case Activation::relu: return Mat::Zero(z.rows(), z.cols());
    case Activation::tanh_act: {
      Mat t = z.array().tanh().matrix();
      return (-2 * t.array() * (1 - t.array().square())).matrix();
    }
    case Activation::elu:
      return Mat((z.array() > 0).select(Mat::Zero(z.rows(), z.cols()).array(), z.array().exp()));
  }
  return Mat::Zero(z.rows(), z.cols());
}

template <typename Scalar>
typename MlpT<Scalar>::Mat forward(const MlpT<Scalar>& net, const typename MlpT<Scalar>::Mat& x,
                                   TapeT<Scalar>* tape) {
  if (net.layers.empty()) throw ValidationError("empty network");
  if (x.rows() != net.input_dim())
    throw ValidationError("input has " + std::to_string(x.rows()) + " rows, net expects " +
                          std::to_string(net.input_dim()));
  if (tape) {
    tape->inputs.clear();
    tape->preacts.clear();
    tape->used = false;
  }
  typename MlpT<Scalar>::Mat h = x;
  for (const auto& l : net.layers) {
    typename MlpT<Scalar>::Mat z = (l.W * h).colwise() + l.b;
    if (tape) {
      tape->inputs.push_back(h);
      tape->preacts.push_back(z);
    }
    h = activate<Scalar>(z, l.act);
  }
  return h;
}

template <typename Scalar>
GradsT<Scalar> backward(const MlpT<Scalar>& net, TapeT<Scalar>& tape,
                        const typename MlpT<Scalar>::Mat& dy) {
  using Mat = typename MlpT<Scalar>::Mat;
  if (tape.used) throw ValidationError("tape already consumed by a backward pass");
  if (tape.inputs.size() != net.layers.size())
    throw ValidationError("tape does not belong to this network");
  if (dy.rows() != net.output_dim() || dy.cols() != tape.preacts.back().cols())
    throw ValidationError("dy shape mismatch");
  tape.used = true;

  GradsT<Scalar> g;
  g.dW.resize(net.layers.size());
  g.db.resize(net.layers.size());
  Mat grad = dy;
  for (int l = static_cast<int>(net.layers.size()) - 1; l >= 0; --l) {
    const auto& layer = net.layers[static_cast<size_t>(l)];
    Mat delta =
        grad.cwiseProduct(activate_grad<Scalar>(tape.preacts[static_cast<size_t>(l)], layer.act));
    g.dW[static_cast<size_t>(l)] = delta * tape.inputs[static_cast<size_t>(l)].transpose();
    g.db[static_cast<size_t>(l)] = delta.rowwise().sum();
    grad = layer.W.transpose() * delta;
  }
  g.dx = grad;
  return g;
}

template <typename Scalar>
typename MlpT<Scalar>::Mat input_gradient(const MlpT<Scalar>& net,
                                          const typename MlpT<Scalar>::Mat& x) {
  if (net.output_dim() != 1)
    throw ValidationError("input_gradient expects a scalar-output net");
  TapeT<Scalar> tape;
  forward(net, x, &tape);
  using Mat = typename MlpT<Scalar>::Mat;
  GradsT<Scalar> g = backward(net, tape, Mat::Ones(1, x.cols()));
  return g.dx;
}

template <typename Scalar>
double input_gradient_norm(const MlpT<Scalar>& net, const typename MlpT<Scalar>::Vec& x) {
  return input_gradient(net, typename MlpT<Scalar>::Mat(x)).norm();
}

template <typename Scalar>
double gradient_penalty(const MlpT<Scalar>& net, const typename MlpT<Scalar>::Mat& x,
                        GradsT<Scalar>& grads_out) {
  using Mat = typename MlpT<Scalar>::Mat;
  const int L = static_cast<int>(net.layers.size());
  const long batch = x.cols();
  if (net.output_dim() != 1)
    throw ValidationError("gradient_penalty expects a scalar-output net");

  // Forward, keeping layer inputs and pre-activations.
  std::vector<Mat> xs(static_cast<size_t>(L) + 1), zs(static_cast<size_t>(L));
  xs[0] = x;
  for (int l = 0; l < L; ++l) {
    zs[static_cast<size_t>(l)] =
        (net.layers[static_cast<size_t>(l)].W * xs[static_cast<size_t>(l)]).colwise() +
        net.layers[static_cast<size_t>(l)].b;
    xs[static_cast<size_t>(l) + 1] =
        activate<Scalar>(zs[static_cast<size_t>(l)], net.layers[static_cast<size_t>(l)].act);
  }

  // Reverse pass for per-sample input gradients g = dD/dx.
  std::vector<Mat> sp(static_cast<size_t>(L));  // sigma'(z_l)
  for (int l = 0; l < L; ++l)
    sp[static_cast<size_t>(l)] =
        activate_grad<Scalar>(zs[static_cast<size_t>(l)], net.layers[static_cast<size_t>(l)].act);
  Mat grad = Mat::Ones(1, batch);
  std::vector<Mat> deltas(static_cast<size_t>(L));
  for (int l = L - 1; l >= 0; --l) {
    deltas[static_cast<size_t>(l)] = grad.cwiseProduct(sp[static_cast<size_t>(l)]);
    grad = net.layers[static_cast<size_t>(l)].W.transpose() * deltas[static_cast<size_t>(l)];
  }
  Mat g0 = grad;  // input_dim x batch
  double value = g0.squaredNorm() / static_cast<double>(batch);

  // Forward tangent pass along v = g0: t_l = sigma'(z_l) o (W_l t_{l-1}).
  // The scalar t_L equals ||g0||^2 per sample; its parameter gradients give
  // d/dtheta of the penalty via the product rule (factor 2).
  std::vector<Mat> ts(static_cast<size_t>(L) + 1), us(static_cast<size_t>(L));
  ts[0] = g0;
  for (int l = 0; l < L; ++l) {
    us[static_cast<size_t>(l)] = net.layers[static_cast<size_t>(l)].W * ts[static_cast<size_t>(l)];
    ts[static_cast<size_t>(l) + 1] =
        sp[static_cast<size_t>(l)].cwiseProduct(us[static_cast<size_t>(l)]);
  }

  // Reverse over the augmented (value, tangent) computation.
  grads_out = GradsT<Scalar>::zeros_like(net);
  Mat xbar = Mat::Zero(1, batch);
  Mat tbar = Mat::Ones(1, batch);
  const Scalar scale = Scalar(2.0 / static_cast<double>(batch));
  for (int l = L - 1; l >= 0; --l) {
    const auto& layer = net.layers[static_cast<size_t>(l)];
    Mat spp = activate_grad2<Scalar>(zs[static_cast<size_t>(l)], layer.act);
    Mat zbar = xbar.cwiseProduct(sp[static_cast<size_t>(l)]) +
               tbar.cwiseProduct(spp).cwiseProduct(us[static_cast<size_t>(l)]);
    Mat ubar = tbar.cwiseProduct(sp[static_cast<size_t>(l)]);
    grads_out.dW[static_cast<size_t>(l)] =
        scale * (zbar * xs[static_cast<size_t>(l)].transpose() +
                 ubar * ts[static_cast<size_t>(l)].transpose());
    grads_out.db[static_cast<size_t>(l)] = scale * zbar.rowwise().sum();
    xbar = layer.W.transpose() * zbar;
    tbar = layer.W.transpose() * ubar;
  }
  return value;
}

#define SOLO9_INSTANTIATE(Scalar)                                                              \
  template typename MlpT<Scalar>::Mat activate<Scalar>(const typename MlpT<Scalar>::Mat&,      \
                                                       Activation);                           \
  template typename MlpT<Scalar>::Mat activate_grad<Scalar>(const typename MlpT<Scalar>::Mat&, \
                                                            Activation);                      \
  template typename MlpT<Scalar>::Mat activate_grad2<Scalar>(                                  \
      const typename MlpT<Scalar>::Mat&, Activation);                                         \
  template typename MlpT<Scalar>::Mat forward<Scalar>(const MlpT<Scalar>&,                    \
                                                      const typename MlpT<Scalar>::Mat&,      \
                                                      TapeT<Scalar>*);                        \
  template GradsT<Scalar> backward<Scalar>(const MlpT<Scalar>&, TapeT<Scalar>&,               \
                                           const typename MlpT<Scalar>::Mat&);                \
  template typename MlpT<Scalar>::Mat input_gradient<Scalar>(                                  \
      const MlpT<Scalar>&, const typename MlpT<Scalar>::Mat&);                                \
  template double input_gradient_norm<Scalar>(const MlpT<Scalar>&,                            \
                                              const typename MlpT<Scalar>::Vec&);             \
  template double gradient_penalty<Scalar>(const MlpT<Scalar>&,                               \
                                           const typename MlpT<Scalar>::Mat&, GradsT<Scalar>&);

SOLO9_INSTANTIATE(double)
SOLO9_INSTANTIATE(float)

#undef SOLO9_INSTANTIATE

}  // namespace solo9
