#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ganlab/rng.hpp"
#include "ganlab/tensor.hpp"

namespace ganlab {

enum class Activation { identity, relu, leaky_relu, sigmoid, tanh, softplus };

struct ActivationSpec {
  Activation kind = Activation::identity;
  double slope = 0.2;  // leaky_relu only

  static ActivationSpec identity() { return {Activation::identity, 0.2}; }
  static ActivationSpec relu() { return {Activation::relu, 0.2}; }
  static ActivationSpec leaky(double slope = 0.2) {
    return {Activation::leaky_relu, slope};
  }
  static ActivationSpec sigmoid() { return {Activation::sigmoid, 0.2}; }
  static ActivationSpec tanh() { return {Activation::tanh, 0.2}; }
  static ActivationSpec softplus() { return {Activation::softplus, 0.2}; }
};

const char* activation_name(Activation a);
ActivationSpec activation_from_name(const std::string& name);

struct MlpLayer {
  Tensor weight;  // (in, out)
  Tensor bias;    // (1, out)
  ActivationSpec act;
};

// Parameter leaves of one net watched on one tape, in parameters() order.
struct MlpParamsHandle {
  std::vector<Tensor> params;
};

// Affine + pointwise-nonlinearity stack over row batches: x -> act(x W + b).
class Mlp {
 public:
  explicit Mlp(std::vector<MlpLayer> layers);

  // dims = {in, h1, ..., out}; one activation per layer. Weights are
  // normal(0, gain/sqrt(fan_in)) with gain sqrt(2) for (leaky) relu, biases 0.
  static Mlp random(const std::vector<std::size_t>& dims,
                    const std::vector<ActivationSpec>& acts, Rng& rng);

  std::size_t input_dim() const;
  std::size_t output_dim() const;
  std::size_t layer_count() const { return layers_.size(); }
  const std::vector<MlpLayer>& layers() const { return layers_; }

  // Canonical order: layer0.weight, layer0.bias, layer1.weight, ...
  std::vector<std::pair<std::string, Tensor*>> parameters();
  std::vector<std::pair<std::string, const Tensor*>> parameters() const;
  std::size_t parameter_count() const;

  MlpParamsHandle watch_params(GradTape& tape) const;

  // Recorded forward. With a handle, gradients reach the parameters; without
  // one the parameters act as constants (the net is "frozen" on this tape).
  Tensor apply(GradTape& tape, const MlpParamsHandle& handle,
               const Tensor& input) const;
  Tensor apply(GradTape& tape, const Tensor& input) const;

  // Plain evaluation, no tape.
  Tensor eval(const Tensor& input) const;

 private:
  Tensor apply_impl(GradTape& tape, const std::vector<const Tensor*>& ws,
                    const std::vector<const Tensor*>& bs,
                    const Tensor& input) const;
  std::vector<MlpLayer> layers_;
};

struct ForwardTrace {
  Tensor input;            // watched input leaf
  MlpParamsHandle params;  // watched parameter leaves
  Tensor output;
};

// Records input and parameters as leaves, then applies the net.
ForwardTrace forward(GradTape& tape, const Mlp& net, const Tensor& input);

// ||grad_x net(x)||_2 for scalar-output nets.
double grad_input_norm(const Mlp& net, const Tensor& x);

// Per-row ||grad_x net(x_i)|| for a (n, d) batch of a scalar-output net;
// rows are independent so one backward from the summed output suffices.
std::vector<double> grad_input_row_norms(const Mlp& net, const Tensor& batch);

enum class JacobianWrt { input, parameters };

// Full Jacobian, one recorded forward + backward per output coordinate.
// Rows index output coordinates; columns index the input (or the flattened
// parameters in canonical order).
Tensor jacobian(const Mlp& net, const Tensor& input, JacobianWrt wrt);

}  // namespace ganlab
