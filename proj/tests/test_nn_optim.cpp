#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ganlab/linalg.hpp"
#include "ganlab/nn.hpp"
#include "ganlab/optim.hpp"
#include "ganlab/rng.hpp"

using namespace ganlab;

namespace {

Mlp identity_layer(std::size_t d) {
  Tensor w = Tensor::zeros({d, d});
  for (std::size_t i = 0; i < d; ++i) w.data[i * d + i] = 1.0;
  return Mlp({MlpLayer{w, Tensor::zeros({1, d}), ActivationSpec::identity()}});
}

}  // namespace

TEST_CASE("identity layer passes input through") {
  Mlp net = identity_layer(2);
  GradTape tape;
  Tensor out = forward(tape, net, Tensor::row({1.0, 2.0})).output;
  CHECK(out.data[0] == 1.0);
  CHECK(out.data[1] == 2.0);
}

TEST_CASE("relu layer clips negatives") {
  Tensor w = Tensor::zeros({2, 2});
  w.data[0] = 1.0;
  w.data[3] = 1.0;
  Mlp net({MlpLayer{w, Tensor::zeros({1, 2}), ActivationSpec::relu()}});
  Tensor out = net.eval(Tensor::row({-1.0, 3.0}));
  CHECK(out.data[0] == 0.0);
  CHECK(out.data[1] == 3.0);
}

TEST_CASE("2-layer tanh net matches a straight-line recomputation") {
  Rng rng(0);
  Mlp net = Mlp::random({2, 3, 1},
                        {ActivationSpec::tanh(), ActivationSpec::identity()},
                        rng);
  const Tensor x = Tensor::row({0.5, -0.5});
  const double got = net.eval(x).item();

  // Independent re-computation of the same arithmetic, scalar by scalar.
  const auto& l0 = net.layers()[0];
  const auto& l1 = net.layers()[1];
  double h[3];
  for (int j = 0; j < 3; ++j) {
    double s = l0.bias.data[j];
    s += 0.5 * l0.weight.data[0 * 3 + j];
    s += -0.5 * l0.weight.data[1 * 3 + j];
    h[j] = std::tanh(s);
  }
  double expect = l1.bias.data[0];
  for (int j = 0; j < 3; ++j) expect += h[j] * l1.weight.data[j * 1 + 0];
  CHECK(got == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("forward rejects mismatched input width") {
  Mlp net = identity_layer(3);
  GradTape tape;
  CHECK_THROWS_WITH_AS((void)net.apply(tape, Tensor::row({1.0, 2.0})),
                       doctest::Contains("input dimension"),
                       std::invalid_argument);
}

TEST_CASE("grad_input_norm: constant, linear and trained-like nets") {
  // Zero weights + sigmoid head: constant 0.5, zero gradient.
  Mlp constant({MlpLayer{Tensor::zeros({2, 1}), Tensor::zeros({1, 1}),
                         ActivationSpec::sigmoid()}});
  CHECK(grad_input_norm(constant, Tensor::row({0.3, 0.7})) == 0.0);

  // net(x) = w . x with w = (1, 2) has gradient norm sqrt(5) everywhere.
  Mlp linear({MlpLayer{Tensor::matrix(2, 1, {1.0, 2.0}), Tensor::zeros({1, 1}),
                       ActivationSpec::identity()}});
  CHECK(grad_input_norm(linear, Tensor::row({-3.0, 11.0})) ==
        doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));

  // Smooth random net far from anything special: finite differences agree.
  Rng rng(5);
  Mlp net = Mlp::random({2, 8, 1},
                        {ActivationSpec::tanh(), ActivationSpec::sigmoid()},
                        rng);
  const Tensor x = Tensor::row({4.0, -3.0});
  const double h = 1e-5;
  double fd_sq = 0.0;
  for (int j = 0; j < 2; ++j) {
    Tensor xp = x, xm = x;
    xp.data[j] += h;
    xm.data[j] -= h;
    const double d = (net.eval(xp).item() - net.eval(xm).item()) / (2 * h);
    fd_sq += d * d;
  }
  CHECK(grad_input_norm(net, x) ==
        doctest::Approx(std::sqrt(fd_sq)).epsilon(1e-6));

  Mlp wide({MlpLayer{Tensor::zeros({2, 2}), Tensor::zeros({1, 2}),
                     ActivationSpec::identity()}});
  CHECK_THROWS_AS((void)grad_input_norm(wide, x), std::invalid_argument);
}

TEST_CASE("jacobian of identity and linear nets") {
  Mlp id = identity_layer(3);
  Tensor j = jacobian(id, Tensor::row({0.2, 0.4, 0.6}), JacobianWrt::input);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      CHECK(j.at(r, c) == (r == c ? 1.0 : 0.0));

  Tensor w = Tensor::matrix(2, 3, {1.0, 2.0, 3.0, 4.0, 5.0, 6.0});
  Mlp lin({MlpLayer{w, Tensor::zeros({1, 3}), ActivationSpec::identity()}});
  Tensor jl = jacobian(lin, Tensor::row({0.5, -0.5}), JacobianWrt::input);
  // Output j = sum_k x_k W_kj, so d out_j / d x_k = W_kj.
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 2; ++c)
      CHECK(jl.at(r, c) == w.at(c, r));
}

TEST_CASE("jacobian rows match finite differences, both wrt kinds") {
  Rng rng(9);
  Mlp net = Mlp::random(
      {2, 5, 3},
      {ActivationSpec::softplus(), ActivationSpec::tanh()}, rng);
  Tensor x = Tensor::row({0.7, -0.2});
  const double h = 1e-5;

  Tensor ji = jacobian(net, x, JacobianWrt::input);
  for (std::size_t c = 0; c < 2; ++c) {
    Tensor xp = x, xm = x;
    xp.data[c] += h;
    xm.data[c] -= h;
    Tensor op = net.eval(xp), om = net.eval(xm);
    for (std::size_t r = 0; r < 3; ++r)
      CHECK(ji.at(r, c) ==
            doctest::Approx((op.data[r] - om.data[r]) / (2 * h)).epsilon(1e-6));
  }

  Tensor jp = jacobian(net, x, JacobianWrt::parameters);
  std::size_t col = 0;
  for (auto& [name, p] : net.parameters()) {
    for (std::size_t k = 0; k < p->numel(); ++k, ++col) {
      const double orig = p->data[k];
      p->data[k] = orig + h;
      Tensor op = net.eval(x);
      p->data[k] = orig - h;
      Tensor om = net.eval(x);
      p->data[k] = orig;
      for (std::size_t r = 0; r < 3; ++r)
        CHECK(jp.at(r, col) ==
              doctest::Approx((op.data[r] - om.data[r]) / (2 * h))
                  .epsilon(1e-5));
    }
  }
}

// Low-dimensional image: with dim Z < output dim the input Jacobian can have
// at most dim Z informative directions.
TEST_CASE("input jacobian of a relu net has numerical rank <= dim Z") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    Rng r = rng.substream(static_cast<std::uint64_t>(trial));
    Mlp net = Mlp::random({2, 16, 16, 10},
                          {ActivationSpec::relu(), ActivationSpec::relu(),
                           ActivationSpec::identity()},
                          r);
    Tensor z = Tensor::row({r.normal(), r.normal()});
    Tensor j = jacobian(net, z, JacobianWrt::input);
    std::vector<double> sv = singular_values(j.data, j.rows(), j.cols());
    REQUIRE(!sv.empty());
    std::size_t rank = 0;
    for (double s : sv)
      if (s > 1e-8 * sv[0]) ++rank;
    CHECK(rank <= 2);
  }
}

TEST_CASE("sgd step follows p <- p - lr g") {
  Tensor p = Tensor::scalar(1.0);
  Optimizer opt = Optimizer::sgd(0.1);
  std::vector<std::pair<std::string, Tensor*>> params{{"p", &p}};
  std::vector<double> g{2.0};
  opt.step(params, {&g});
  CHECK(p.item() == doctest::Approx(0.8).epsilon(1e-15));

  std::vector<double> zero{0.0};
  opt.step(params, {&zero});
  CHECK(p.item() == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("adam first step matches the scalar hand computation") {
  // g = 1: m = 0.1, v = 0.001, mhat = 1, vhat = 1,
  // delta = lr * 1 / (sqrt(1) + 1e-8).
  Tensor p = Tensor::scalar(1.0);
  const double lr = 0.05;
  Optimizer opt = Optimizer::adam(lr);
  std::vector<std::pair<std::string, Tensor*>> params{{"p", &p}};
  std::vector<double> g{1.0};
  opt.step(params, {&g});
  const double expected = 1.0 - lr * 1.0 / (1.0 + 1e-8);
  CHECK(p.item() == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("NaN gradients are rejected with the parameter name") {
  Tensor w = Tensor::scalar(1.0), b = Tensor::scalar(0.0);
  Optimizer opt = Optimizer::sgd(0.1);
  std::vector<std::pair<std::string, Tensor*>> params{{"layer0.weight", &w},
                                                      {"layer0.bias", &b}};
  std::vector<double> gw{0.5};
  std::vector<double> gb{std::nan("")};
  CHECK_THROWS_WITH_AS(opt.step(params, {&gw, &gb}),
                       doctest::Contains("layer0.bias"), std::runtime_error);
}
