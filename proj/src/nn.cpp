#include "ganlab/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace ganlab {

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::leaky_relu: return "leaky_relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::softplus: return "softplus";
  }
  return "?";
}

ActivationSpec activation_from_name(const std::string& name) {
  if (name == "identity") return ActivationSpec::identity();
  if (name == "relu") return ActivationSpec::relu();
  if (name == "leaky_relu") return ActivationSpec::leaky();
  if (name == "sigmoid") return ActivationSpec::sigmoid();
  if (name == "tanh") return ActivationSpec::tanh();
  if (name == "softplus") return ActivationSpec::softplus();
  throw std::invalid_argument("unknown activation: " + name);
}

Mlp::Mlp(std::vector<MlpLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw std::invalid_argument("Mlp: needs >= 1 layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const MlpLayer& l = layers_[i];
    if (l.weight.shape.size() != 2 || l.bias.shape.size() != 2 ||
        l.bias.rows() != 1 || l.bias.cols() != l.weight.cols())
      throw std::invalid_argument("Mlp: layer " + std::to_string(i) +
                                  " has inconsistent weight/bias shapes");
    if (!l.weight.all_finite() || !l.bias.all_finite())
      throw std::invalid_argument("Mlp: layer " + std::to_string(i) +
                                  " has non-finite parameters");
    if (l.act.kind == Activation::leaky_relu && !(l.act.slope > 0.0))
      throw std::invalid_argument("Mlp: leaky slope must be positive");
    if (i + 1 < layers_.size() &&
        layers_[i].weight.cols() != layers_[i + 1].weight.rows())
      throw std::invalid_argument(
          "Mlp: layer " + std::to_string(i) + " output dim " +
          std::to_string(layers_[i].weight.cols()) +
          " does not feed layer " + std::to_string(i + 1) + " input dim " +
          std::to_string(layers_[i + 1].weight.rows()));
  }
}

Mlp Mlp::random(const std::vector<std::size_t>& dims,
                const std::vector<ActivationSpec>& acts, Rng& rng) {
  if (dims.size() < 2 || acts.size() != dims.size() - 1)
    throw std::invalid_argument("Mlp::random: need dims {in,...,out} and one "
                                "activation per layer");
  std::vector<MlpLayer> layers;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    const std::size_t fan_in = dims[i], fan_out = dims[i + 1];
    const bool rectified = acts[i].kind == Activation::relu ||
                           acts[i].kind == Activation::leaky_relu;
    const double std = (rectified ? std::sqrt(2.0) : 1.0) /
                       std::sqrt(static_cast<double>(fan_in));
    Tensor w = Tensor::zeros({fan_in, fan_out});
    for (double& v : w.data) v = rng.normal(0.0, std);
    layers.push_back({std::move(w), Tensor::zeros({1, fan_out}), acts[i]});
  }
  return Mlp(std::move(layers));
}

std::size_t Mlp::input_dim() const { return layers_.front().weight.rows(); }
std::size_t Mlp::output_dim() const { return layers_.back().weight.cols(); }

std::vector<std::pair<std::string, Tensor*>> Mlp::parameters() {
  std::vector<std::pair<std::string, Tensor*>> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    out.emplace_back("layer" + std::to_string(i) + ".weight",
                     &layers_[i].weight);
    out.emplace_back("layer" + std::to_string(i) + ".bias", &layers_[i].bias);
  }
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> Mlp::parameters() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    out.emplace_back("layer" + std::to_string(i) + ".weight",
                     &layers_[i].weight);
    out.emplace_back("layer" + std::to_string(i) + ".bias", &layers_[i].bias);
  }
  return out;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weight.numel() + l.bias.numel();
  return n;
}

MlpParamsHandle Mlp::watch_params(GradTape& tape) const {
  MlpParamsHandle h;
  for (const auto& l : layers_) {
    h.params.push_back(tape.watch(l.weight));
    h.params.push_back(tape.watch(l.bias));
  }
  return h;
}

namespace {

Tensor apply_activation(GradTape& tape, const ActivationSpec& act,
                        const Tensor& x) {
  switch (act.kind) {
    case Activation::identity: return x;
    case Activation::relu: return relu(tape, x);
    case Activation::leaky_relu: return leaky_relu(tape, x, act.slope);
    case Activation::sigmoid: return sigmoid(tape, x);
    case Activation::tanh: return tanh(tape, x);
    case Activation::softplus: return softplus(tape, x);
  }
  throw std::logic_error("unreachable");
}

}  // namespace

Tensor Mlp::apply_impl(GradTape& tape, const std::vector<const Tensor*>& ws,
                       const std::vector<const Tensor*>& bs,
                       const Tensor& input) const {
  if (input.shape.size() != 2 || input.cols() != input_dim())
    throw std::invalid_argument(
        "Mlp: input shape " + input.shape_str() + " does not match first "
        "layer input dimension " + std::to_string(input_dim()));
  Tensor h = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    h = add_rowwise(tape, matmul(tape, h, *ws[i]), *bs[i]);
    h = apply_activation(tape, layers_[i].act, h);
  }
  return h;
}

Tensor Mlp::apply(GradTape& tape, const MlpParamsHandle& handle,
                  const Tensor& input) const {
  if (handle.params.size() != 2 * layers_.size())
    throw std::invalid_argument("Mlp::apply: handle does not match this net");
  std::vector<const Tensor*> ws, bs;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    ws.push_back(&handle.params[2 * i]);
    bs.push_back(&handle.params[2 * i + 1]);
  }
  return apply_impl(tape, ws, bs, input);
}

Tensor Mlp::apply(GradTape& tape, const Tensor& input) const {
  std::vector<const Tensor*> ws, bs;
  for (const auto& l : layers_) {
    ws.push_back(&l.weight);
    bs.push_back(&l.bias);
  }
  return apply_impl(tape, ws, bs, input);
}

Tensor Mlp::eval(const Tensor& input) const {
  if (input.shape.size() != 2 || input.cols() != input_dim())
    throw std::invalid_argument(
        "Mlp: input shape " + input.shape_str() + " does not match first "
        "layer input dimension " + std::to_string(input_dim()));
  const std::size_t n = input.rows();
  std::vector<double> h = input.data;
  std::size_t width = input.cols();
  for (const MlpLayer& l : layers_) {
    const std::size_t in = l.weight.rows(), out = l.weight.cols();
    std::vector<double> next(n * out);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < out; ++j) next[r * out + j] = l.bias.data[j];
      for (std::size_t k = 0; k < in; ++k) {
        const double hv = h[r * in + k];
        if (hv == 0.0) continue;
        for (std::size_t j = 0; j < out; ++j)
          next[r * out + j] += hv * l.weight.data[k * out + j];
      }
    }
    for (double& v : next) {
      switch (l.act.kind) {
        case Activation::identity: break;
        case Activation::relu: v = v > 0.0 ? v : 0.0; break;
        case Activation::leaky_relu: v = v > 0.0 ? v : l.act.slope * v; break;
        case Activation::sigmoid: v = stable_sigmoid(v); break;
        case Activation::tanh: v = std::tanh(v); break;
        case Activation::softplus: v = stable_softplus(v); break;
      }
    }
    h = std::move(next);
    width = out;
  }
  return Tensor({n, width}, std::move(h));
}

ForwardTrace forward(GradTape& tape, const Mlp& net, const Tensor& input) {
  ForwardTrace tr;
  tr.input = tape.watch(input);
  tr.params = net.watch_params(tape);
  tr.output = net.apply(tape, tr.params, tr.input);
  return tr;
}

double grad_input_norm(const Mlp& net, const Tensor& x) {
  if (net.output_dim() != 1)
    throw std::invalid_argument(
        "grad_input_norm: net output must be scalar, got dim " +
        std::to_string(net.output_dim()));
  GradTape tape;
  ForwardTrace tr = forward(tape, net, x);
  Tensor out = sum_all(tape, tr.output);
  GradientMap g = tape.backward(out);
  return g.l2_norm(tr.input);
}

std::vector<double> grad_input_row_norms(const Mlp& net, const Tensor& batch) {
  if (net.output_dim() != 1)
    throw std::invalid_argument("grad_input_row_norms: net output must be "
                                "scalar");
  GradTape tape;
  Tensor x = tape.watch(batch);
  Tensor out = net.apply(tape, x);
  GradientMap g = tape.backward(sum_all(tape, out));
  const auto& gx = g.at(x);
  const std::size_t n = batch.rows(), d = batch.cols();
  std::vector<double> norms(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += gx[i * d + j] * gx[i * d + j];
    norms[i] = std::sqrt(s);
  }
  return norms;
}

Tensor jacobian(const Mlp& net, const Tensor& input, JacobianWrt wrt) {
  if (input.shape.size() != 2 || input.rows() != 1)
    throw std::invalid_argument("jacobian: input must be a single (1, d) row");
  const std::size_t out_dim = net.output_dim();
  const std::size_t n_cols = wrt == JacobianWrt::input
                                 ? input.cols()
                                 : net.parameter_count();
  Tensor jac = Tensor::zeros({out_dim, n_cols});
  for (std::size_t coord = 0; coord < out_dim; ++coord) {
    GradTape tape;
    ForwardTrace tr = forward(tape, net, input);
    // Select one output coordinate via a constant mask.
    Tensor mask = Tensor::zeros({1, out_dim});
    mask.data[coord] = 1.0;
    Tensor picked = sum_all(tape, mul(tape, tr.output, mask));
    GradientMap g = tape.backward(picked);
    if (wrt == JacobianWrt::input) {
      const auto& gx = g.at(tr.input);
      for (std::size_t j = 0; j < n_cols; ++j) jac.data[coord * n_cols + j] = gx[j];
    } else {
      std::size_t offset = 0;
      for (const Tensor& p : tr.params.params) {
        const auto& gp = g.at(p);
        for (std::size_t j = 0; j < gp.size(); ++j)
          jac.data[coord * n_cols + offset + j] = gp[j];
        offset += gp.size();
      }
    }
  }
  return jac;
}

}  // namespace ganlab
