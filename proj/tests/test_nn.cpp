#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "solo9/nn/adam.hpp"
#include "solo9/nn/checkpoint.hpp"
#include "solo9/nn/normalizer.hpp"

using namespace solo9;

namespace {

Mlp random_net(Rng& rng, int in, std::vector<int> hidden, int out,
               Activation act = Activation::tanh_act) {
  Mlp net = Mlp::make(in, hidden, out, act, rng, 1.0);
  // Larger weights so finite differences see curvature.
  for (auto& l : net.layers) {
    for (long i = 0; i < l.W.size(); ++i) l.W.data()[i] = rng.uniform(-0.8, 0.8);
    for (long i = 0; i < l.b.size(); ++i) l.b[i] = rng.uniform(-0.3, 0.3);
  }
  return net;
}

// Scalar loss <dy, f(x)> for finite differencing.
double loss_of(const Mlp& net, const MatX& x, const MatX& dy) {
  return (forward(net, x).cwiseProduct(dy)).sum();
}

double max_rel_err(double a, double b, double floor_ = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor_});
}

}  // namespace

TEST_CASE("mlp: zero net maps anything to zero, identity layer passes through") {
  Rng rng(1);
  Mlp zero = Mlp::make(4, {8}, 2, Activation::tanh_act, rng);
  for (auto& l : zero.layers) {
    l.W.setZero();
    l.b.setZero();
  }
  MatX x(4, 3);
  x.setRandom();
  CHECK(forward(zero, x).norm() == 0.0);

  Mlp id;
  id.layers.push_back({MatX::Identity(4, 4), VecX::Zero(4), Activation::identity});
  CHECK((forward(id, x) - x).norm() == 0.0);
}

TEST_CASE("mlp: two-layer forward matches a naive matrix oracle to 1e-12") {
  Rng rng(2);
  Mlp net = random_net(rng, 5, {7}, 3);
  MatX x(5, 4);
  for (long i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1, 1);
  MatX y = forward(net, x);
  for (int c = 0; c < 4; ++c) {
    VecX h = net.layers[0].W * x.col(c) + net.layers[0].b;
    for (int i = 0; i < h.size(); ++i) h[i] = std::tanh(h[i]);
    VecX o = net.layers[1].W * h + net.layers[1].b;
    CHECK((y.col(c) - o).norm() < 1e-12);
  }
}

TEST_CASE("mlp: shape mismatch is an error, tape reuse is an error") {
  Rng rng(3);
  Mlp net = random_net(rng, 4, {6}, 2);
  MatX bad(5, 1);
  bad.setZero();
  CHECK_THROWS_AS(forward(net, bad), ValidationError);

  MatX x(4, 2);
  x.setRandom();
  Tape tape;
  forward(net, x, &tape);
  MatX dy(2, 2);
  dy.setOnes();
  backward(net, tape, dy);
  CHECK_THROWS_AS(backward(net, tape, dy), ValidationError);
}

TEST_CASE("mlp: backward matches central finite differences on every layer kind") {
  Rng rng(4);
  for (Activation act : {Activation::tanh_act, Activation::elu, Activation::relu,
                          Activation::identity}) {
    Mlp net = random_net(rng, 6, {9, 5}, 2, act);
    MatX x(6, 3);
    for (long i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1, 1) + 0.01;
    MatX dy(2, 3);
    for (long i = 0; i < dy.size(); ++i) dy.data()[i] = rng.uniform(-1, 1);

    Tape tape;
    forward(net, x, &tape);
    Grads g = backward(net, tape, dy);

    const double h = 1e-6;
    double worst = 0.0;
    for (size_t l = 0; l < net.layers.size(); ++l) {
      Mlp probe = net;
      for (long k = 0; k < net.layers[l].W.size(); k += 7) {
        probe.layers[l].W.data()[k] = net.layers[l].W.data()[k] + h;
        double up = loss_of(probe, x, dy);
        probe.layers[l].W.data()[k] = net.layers[l].W.data()[k] - h;
        double dn = loss_of(probe, x, dy);
        probe.layers[l].W.data()[k] = net.layers[l].W.data()[k];
        worst = std::max(worst, max_rel_err((up - dn) / (2 * h), g.dW[l].data()[k]));
      }
      for (long k = 0; k < net.layers[l].b.size(); ++k) {
        probe.layers[l].b[k] = net.layers[l].b[k] + h;
        double up = loss_of(probe, x, dy);
        probe.layers[l].b[k] = net.layers[l].b[k] - h;
        double dn = loss_of(probe, x, dy);
        probe.layers[l].b[k] = net.layers[l].b[k];
        worst = std::max(worst, max_rel_err((up - dn) / (2 * h), g.db[l][k]));
      }
    }
    // Input gradient against finite differences too.
    MatX xp = x;
    for (long k = 0; k < x.size(); k += 5) {
      xp.data()[k] = x.data()[k] + h;
      double up = loss_of(net, xp, dy);
      xp.data()[k] = x.data()[k] - h;
      double dn = loss_of(net, xp, dy);
      xp.data()[k] = x.data()[k];
      worst = std::max(worst, max_rel_err((up - dn) / (2 * h), g.dx.data()[k]));
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("mlp: zero dy gives zero gradients, linear net input-grad is exact") {
  Rng rng(5);
  Mlp net = random_net(rng, 4, {6}, 2);
  MatX x(4, 2);
  x.setRandom();
  Tape tape;
  forward(net, x, &tape);
  Grads g = backward(net, tape, MatX::Zero(2, 2));
  for (const auto& dw : g.dW) CHECK(dw.norm() == 0.0);
  CHECK(g.dx.norm() == 0.0);

  Mlp lin;
  MatX W(2, 4);
  W.setRandom();
  lin.layers.push_back({W, VecX::Zero(2), Activation::identity});
  Tape t2;
  forward(lin, x, &t2);
  MatX dy(2, 2);
  dy.setRandom();
  Grads g2 = backward(lin, t2, dy);
  CHECK((g2.dx - W.transpose() * dy).norm() < 1e-14);
}

TEST_CASE("mlp: input gradient norm cases") {
  Rng rng(6);
  // Constant-output net.
  Mlp c = Mlp::make(5, {4}, 1, Activation::tanh_act, rng);
  for (auto& l : c.layers) l.W.setZero();
  c.layers.back().b[0] = 3.0;
  VecX x(5);
  x.setRandom();
  CHECK(input_gradient_norm(c, x) == 0.0);

  // Linear functional: norm equals |w|.
  Mlp lin;
  MatX W(1, 5);
  W.setRandom();
  lin.layers.push_back({W, VecX::Zero(1), Activation::identity});
  CHECK(input_gradient_norm(lin, x) == doctest::Approx(W.norm()).epsilon(1e-12));

  // Random net vs finite differences.
  Mlp net = random_net(rng, 5, {8, 6}, 1);
  VecX g = input_gradient(net, MatX(x)).col(0);
  const double h = 1e-6;
  for (int k = 0; k < 5; ++k) {
    VecX xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    double fd = (forward(net, MatX(xp))(0, 0) - forward(net, MatX(xm))(0, 0)) / (2 * h);
    CHECK(max_rel_err(fd, g[k]) < 1e-4);
  }
}

TEST_CASE("mlp: gradient-penalty parameter gradients match finite differences") {
  Rng rng(7);
  for (Activation act : {Activation::tanh_act, Activation::elu}) {
    Mlp net = random_net(rng, 5, {7, 6}, 1, act);
    MatX x(5, 4);
    for (long i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1, 1);

    Grads g;
    double value = gradient_penalty(net, x, g);

    // Value oracle: mean of squared input-gradient norms.
    MatX gin = input_gradient(net, x);
    CHECK(value == doctest::Approx(gin.squaredNorm() / 4.0).epsilon(1e-12));

    const double h = 1e-5;
    double worst = 0.0;
    Mlp probe = net;
    for (size_t l = 0; l < net.layers.size(); ++l) {
      for (long k = 0; k < net.layers[l].W.size(); k += 5) {
        Grads tmp;
        probe.layers[l].W.data()[k] = net.layers[l].W.data()[k] + h;
        double up = gradient_penalty(probe, x, tmp);
        probe.layers[l].W.data()[k] = net.layers[l].W.data()[k] - h;
        double dn = gradient_penalty(probe, x, tmp);
        probe.layers[l].W.data()[k] = net.layers[l].W.data()[k];
        worst = std::max(worst, max_rel_err((up - dn) / (2 * h), g.dW[l].data()[k], 1e-5));
      }
      for (long k = 0; k < net.layers[l].b.size(); k += 3) {
        Grads tmp;
        probe.layers[l].b[k] = net.layers[l].b[k] + h;
        double up = gradient_penalty(probe, x, tmp);
        probe.layers[l].b[k] = net.layers[l].b[k] - h;
        double dn = gradient_penalty(probe, x, tmp);
        probe.layers[l].b[k] = net.layers[l].b[k];
        worst = std::max(worst, max_rel_err((up - dn) / (2 * h), g.db[l][k], 1e-5));
      }
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("mlp: float instantiation runs") {
  Rng rng(8);
  MlpT<float> net = MlpT<float>::make(3, {4}, 1, Activation::tanh_act, rng);
  MlpT<float>::Mat x(3, 2);
  x.setRandom();
  CHECK(forward(net, x).allFinite());
}

TEST_CASE("adam: zero gradients leave fresh params unchanged, moments decay") {
  Rng rng(9);
  Mlp net = random_net(rng, 3, {4}, 1);
  Mlp before = net;
  AdamState st = AdamState::init(net);
  Grads g = Grads::zeros_like(net);
  AdamHyper h;
  adam_step(net, g, st, h);
  for (size_t l = 0; l < net.layers.size(); ++l)
    CHECK((net.layers[l].W - before.layers[l].W).norm() == 0.0);

  // Nonzero moments decay by beta when the gradient is zero.
  st.mW[0].setConstant(1.0);
  st.vW[0].setConstant(1.0);
  adam_step(net, g, st, h);
  CHECK(st.mW[0](0, 0) == doctest::Approx(h.beta1));
  CHECK(st.vW[0](0, 0) == doctest::Approx(h.beta2));
}

TEST_CASE("adam: three-step scalar sequence matches the hand-computed updates") {
  // One scalar parameter, gradient sequence {1, -2, 0.5}.
  Mlp net;
  net.layers.push_back({MatX::Constant(1, 1, 0.0), VecX::Zero(0), Activation::identity});
  AdamState st;
  st.mW.emplace_back(MatX::Zero(1, 1));
  st.vW.emplace_back(MatX::Zero(1, 1));
  st.mb.emplace_back(VecX::Zero(0));
  st.vb.emplace_back(VecX::Zero(0));
  AdamHyper h;
  h.lr = 0.1;

  double p = 0.0, m = 0.0, v = 0.0;
  double gs[3] = {1.0, -2.0, 0.5};
  for (int t = 1; t <= 3; ++t) {
    Grads g;
    g.dW.emplace_back(MatX::Constant(1, 1, gs[t - 1]));
    g.db.emplace_back(VecX::Zero(0));
    adam_step(net, g, st, h);

    m = h.beta1 * m + (1 - h.beta1) * gs[t - 1];
    v = h.beta2 * v + (1 - h.beta2) * gs[t - 1] * gs[t - 1];
    double mhat = m / (1 - std::pow(h.beta1, t));
    double vhat = v / (1 - std::pow(h.beta2, t));
    p -= h.lr * mhat / (std::sqrt(vhat) + h.eps);
    CHECK(net.layers[0].W(0, 0) == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("adam: identical nets and grads stay identical, non-finite grads throw") {
  Rng rng(10);
  Mlp a = random_net(rng, 3, {4}, 2);
  Mlp b = a;
  AdamState sa = AdamState::init(a), sb = AdamState::init(b);
  Grads g = Grads::zeros_like(a);
  for (auto& dw : g.dW) dw.setRandom();
  AdamHyper h;
  adam_step(a, g, sa, h);
  adam_step(b, g, sb, h);
  for (size_t l = 0; l < a.layers.size(); ++l)
    CHECK((a.layers[l].W - b.layers[l].W).norm() == 0.0);

  g.dW[0](0, 0) = std::nan("");
  Mlp before = a;
  CHECK_THROWS_AS(adam_step(a, g, sa, h), ValidationError);
  CHECK((a.layers[0].W - before.layers[0].W).norm() == 0.0);
}

TEST_CASE("normalizer: pooled two-batch update equals the concatenated update") {
  Rng rng(11);
  MatX a(4, 50), b(4, 30);
  for (long i = 0; i < a.size(); ++i) a.data()[i] = rng.uniform(-2, 5);
  for (long i = 0; i < b.size(); ++i) b.data()[i] = rng.uniform(-1, 1);
  RunningNormalizer two(4), one(4);
  two.update(a);
  two.update(b);
  MatX ab(4, 80);
  ab << a, b;
  one.update(ab);
  CHECK((two.mean - one.mean).norm() < 1e-12);
  CHECK((two.variance() - one.variance()).norm() < 1e-12);
}

TEST_CASE("normalizer: constant stream hits the variance floor; affine inverse") {
  RunningNormalizer n(2);
  MatX c = MatX::Constant(2, 20, 3.5);
  n.update(c);
  CHECK(n.variance()[0] == doctest::Approx(1e-8));

  Rng rng(12);
  RunningNormalizer m(3);
  MatX batch(3, 40);
  for (long i = 0; i < batch.size(); ++i) batch.data()[i] = rng.uniform(-4, 4);
  m.update(batch);
  VecX x(3);
  x << 0.3, -1.2, 2.0;
  CHECK((m.denormalize(m.normalize(x)) - x).norm() < 1e-10);
}

TEST_CASE("checkpoint: full round trip preserves everything") {
  Rng rng(13);
  Mlp net = random_net(rng, 4, {5}, 2);
  AdamState st = AdamState::init(net);
  st.step = 17;
  st.mW[0].setRandom();
  RunningNormalizer nz(6);
  MatX batch(6, 10);
  batch.setRandom();
  nz.update(batch);
  VecX vec(5);
  vec.setRandom();

  std::string path = "/tmp/solo9_ckpt_test.bin";
  {
    CheckpointWriter w(path);
    w.put_i64("step", 123);
    w.put_f64("lr", 2.5e-4);
    w.put_string("note", "hello");
    w.put_vec("v", vec);
    w.put_mlp("net", net);
    w.put_adam("opt", st);
    w.put_normalizer("norm", nz);
  }
  CheckpointReader r(path);
  CHECK(r.get_i64("step") == 123);
  CHECK(r.get_f64("lr") == doctest::Approx(2.5e-4));
  CHECK(r.get_string("note") == "hello");
  CHECK((r.get_vec("v") - vec).norm() == 0.0);
  Mlp net2 = r.get_mlp("net");
  for (size_t l = 0; l < net.layers.size(); ++l) {
    CHECK((net2.layers[l].W - net.layers[l].W).norm() == 0.0);
    CHECK(net2.layers[l].act == net.layers[l].act);
  }
  AdamState st2 = r.get_adam("opt");
  CHECK(st2.step == 17);
  CHECK((st2.mW[0] - st.mW[0]).norm() == 0.0);
  RunningNormalizer nz2 = r.get_normalizer("norm");
  CHECK((nz2.mean - nz.mean).norm() == 0.0);
  CHECK(nz2.count == nz.count);
  std::remove(path.c_str());
}

TEST_CASE("checkpoint: wrong record name fails loudly") {
  std::string path = "/tmp/solo9_ckpt_test2.bin";
  {
    CheckpointWriter w(path);
    w.put_i64("alpha", 1);
  }
  CheckpointReader r(path);
  CHECK_THROWS_AS(r.get_i64("beta"), ValidationError);
  std::remove(path.c_str());
}
