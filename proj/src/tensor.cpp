#include "ganlab/tensor.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ganlab {

namespace {

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
  if (shape.empty()) throw std::invalid_argument("tensor shape must be non-empty");
  std::size_t n = 1;
  for (std::size_t d : shape) {
    if (d == 0) throw std::invalid_argument("tensor dimensions must be positive");
    n *= d;
  }
  return n;
}

std::atomic<std::uint64_t> g_tape_serial{1};

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape_in, std::vector<double> data_in)
    : shape(std::move(shape_in)), data(std::move(data_in)) {
  if (shape_numel(shape) != data.size()) {
    throw std::invalid_argument("tensor data length does not match shape " +
                                shape_str());
  }
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
  std::size_t n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value) {
  std::size_t n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::scalar(double value) { return Tensor({1}, {value}); }

Tensor Tensor::row(std::vector<double> values) {
  std::size_t n = values.size();
  return Tensor({1, n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols,
                      std::vector<double> values) {
  return Tensor({rows, cols}, std::move(values));
}

std::size_t Tensor::numel() const {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::size_t Tensor::rows() const {
  if (shape.size() != 2) throw std::logic_error("rows(): tensor is not 2-d");
  return shape[0];
}

std::size_t Tensor::cols() const {
  if (shape.size() != 2) throw std::logic_error("cols(): tensor is not 2-d");
  return shape[1];
}

double Tensor::item() const {
  if (numel() != 1)
    throw std::invalid_argument("item(): tensor has " +
                                std::to_string(numel()) + " elements");
  return data[0];
}

double& Tensor::at(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
double Tensor::at(std::size_t r, std::size_t c) const {
  return data[r * cols() + c];
}

bool Tensor::all_finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < shape.size(); ++i)
    os << shape[i] << (i + 1 < shape.size() ? ", " : "");
  os << ")";
  return os.str();
}

Tensor Tensor::detached() const {
  Tensor t = *this;
  t.node = -1;
  t.tape_serial = 0;
  return t;
}

// --- GradientMap ----------------------------------------------------------

const std::vector<double>& GradientMap::at(const Tensor& t) const {
  if (!contains(t))
    throw std::invalid_argument(
        "GradientMap::at: tensor was not recorded on the tape this map came "
        "from");
  return by_node_[static_cast<std::size_t>(t.node)];
}

bool GradientMap::contains(const Tensor& t) const {
  return t.node >= 0 && t.tape_serial == tape_serial_ &&
         static_cast<std::size_t>(t.node) < by_node_.size();
}

double GradientMap::l2_norm(const Tensor& t) const {
  const auto& g = at(t);
  double s = 0.0;
  for (double v : g) s += v * v;
  return std::sqrt(s);
}

// --- GradTape ---------------------------------------------------------------

GradTape::GradTape() : serial_(g_tape_serial.fetch_add(1)) {}

Tensor GradTape::watch(const Tensor& value) {
  Tensor out = value;
  out.node = record({}, value.numel(), nullptr);
  out.tape_serial = serial_;
  return out;
}

int GradTape::record(std::vector<int> parents, std::size_t out_numel,
                     BackwardFn fn) {
  if (consumed_)
    throw std::logic_error(
        "GradTape: tape already consumed by backward; record a fresh forward "
        "pass on a new tape");
  for (int p : parents) {
    if (p < 0 || static_cast<std::size_t>(p) >= nodes_.size())
      throw std::logic_error("GradTape: parent node out of range");
  }
  nodes_.push_back(Node{std::move(parents), out_numel, std::move(fn)});
  return static_cast<int>(nodes_.size() - 1);
}

void GradTape::check_membership(const Tensor& t, const char* what) const {
  if (t.node >= 0 && t.tape_serial != serial_)
    throw std::logic_error(std::string(what) +
                           ": tensor belongs to a different tape");
}

GradientMap GradTape::backward(const Tensor& loss) {
  if (loss.node < 0)
    throw std::invalid_argument(
        "backward: loss is not on any tape (no forward pass recorded)");
  if (loss.tape_serial != serial_)
    throw std::invalid_argument("backward: loss was recorded on another tape");
  if (!loss.is_scalar())
    throw std::invalid_argument("backward: loss must be scalar, got shape " +
                                loss.shape_str());
  if (consumed_) throw std::logic_error("backward: tape already consumed");
  consumed_ = true;

  GradientMap map;
  map.tape_serial_ = serial_;
  map.by_node_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    map.by_node_[i].assign(nodes_[i].numel, 0.0);

  map.by_node_[static_cast<std::size_t>(loss.node)][0] = 1.0;
  for (int i = loss.node; i >= 0; --i) {
    const Node& node = nodes_[static_cast<std::size_t>(i)];
    if (!node.fn) continue;  // leaf
    node.fn(map.by_node_[static_cast<std::size_t>(i)], map.by_node_);
  }
  return map;
}

// --- op helpers -------------------------------------------------------------

namespace {

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape != b.shape)
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                a.shape_str() + " vs " + b.shape_str());
}

// Builds the result tensor and wires the backward closure. `fn` receives the
// (possibly -1) parent ids in the order given here.
Tensor make_node(GradTape& tape, const std::vector<const Tensor*>& inputs,
                 std::vector<std::size_t> shape, std::vector<double> data,
                 std::function<void(const std::vector<double>&,
                                    std::vector<std::vector<double>>&,
                                    const std::vector<int>&)>
                     fn) {
  std::vector<int> parent_ids;
  std::vector<int> all_ids;
  for (const Tensor* t : inputs) {
    tape.check_membership(*t, "op");
    all_ids.push_back(t->node);
    if (t->node >= 0) parent_ids.push_back(t->node);
  }
  Tensor out(std::move(shape), std::move(data));
  out.node = tape.record(
      std::move(parent_ids), out.numel(),
      [fn = std::move(fn), all_ids](const std::vector<double>& gout,
                                    std::vector<std::vector<double>>& grads) {
        fn(gout, grads, all_ids);
      });
  out.tape_serial = tape.serial();
  return out;
}

Tensor unary_elementwise(GradTape& tape, const Tensor& a,
                         const std::function<double(double)>& f,
                         const std::function<std::vector<double>(
                             const std::vector<double>& x,
                             const std::vector<double>& y)>&
                             local_grad) {
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(a.data[i]);
  std::vector<double> partial = local_grad(a.data, out);
  return make_node(
      tape, {&a}, a.shape, std::move(out),
      [partial = std::move(partial)](const std::vector<double>& gout,
                                     std::vector<std::vector<double>>& grads,
                                     const std::vector<int>& ids) {
        if (ids[0] < 0) return;
        auto& ga = grads[static_cast<std::size_t>(ids[0])];
        for (std::size_t i = 0; i < gout.size(); ++i)
          ga[i] += gout[i] * partial[i];
      });
}

}  // namespace

Tensor matmul(GradTape& tape, const Tensor& a, const Tensor& b) {
  if (a.shape.size() != 2 || b.shape.size() != 2)
    throw std::invalid_argument("matmul: operands must be 2-d, got " +
                                a.shape_str() + " and " + b.shape_str());
  if (a.cols() != b.rows())
    throw std::invalid_argument("matmul: inner dimensions differ, " +
                                a.shape_str() + " x " + b.shape_str());
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  std::vector<double> out(n * m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      const double av = a.data[i * k + l];
      if (av == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j)
        out[i * m + j] += av * b.data[l * m + j];
    }
  std::vector<double> a_data = a.data;
  std::vector<double> b_data = b.data;
  return make_node(
      tape, {&a, &b}, {n, m}, std::move(out),
      [n, k, m, a_data = std::move(a_data), b_data = std::move(b_data)](
          const std::vector<double>& gout,
          std::vector<std::vector<double>>& grads,
          const std::vector<int>& ids) {
        if (ids[0] >= 0) {  // dA = G * B^T
          auto& ga = grads[static_cast<std::size_t>(ids[0])];
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) {
              const double g = gout[i * m + j];
              if (g == 0.0) continue;
              for (std::size_t l = 0; l < k; ++l)
                ga[i * k + l] += g * b_data[l * m + j];
            }
        }
        if (ids[1] >= 0) {  // dB = A^T * G
          auto& gb = grads[static_cast<std::size_t>(ids[1])];
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < k; ++l) {
              const double av = a_data[i * k + l];
              if (av == 0.0) continue;
              for (std::size_t j = 0; j < m; ++j)
                gb[l * m + j] += av * gout[i * m + j];
            }
        }
      });
}

Tensor add_rowwise(GradTape& tape, const Tensor& a, const Tensor& bias) {
  if (a.shape.size() != 2 || bias.shape.size() != 2 || bias.rows() != 1 ||
      bias.cols() != a.cols())
    throw std::invalid_argument("add_rowwise: need (n, m) and (1, m), got " +
                                a.shape_str() + " and " + bias.shape_str());
  const std::size_t n = a.rows(), m = a.cols();
  std::vector<double> out(a.data);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out[i * m + j] += bias.data[j];
  return make_node(
      tape, {&a, &bias}, a.shape, std::move(out),
      [n, m](const std::vector<double>& gout,
             std::vector<std::vector<double>>& grads,
             const std::vector<int>& ids) {
        if (ids[0] >= 0) {
          auto& ga = grads[static_cast<std::size_t>(ids[0])];
          for (std::size_t i = 0; i < gout.size(); ++i) ga[i] += gout[i];
        }
        if (ids[1] >= 0) {
          auto& gb = grads[static_cast<std::size_t>(ids[1])];
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) gb[j] += gout[i * m + j];
        }
      });
}

namespace {

Tensor binary_same_shape(GradTape& tape, const Tensor& a, const Tensor& b,
                         const char* name, double sign_b,
                         bool is_product) {
  check_same_shape(a, b, name);
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = is_product ? a.data[i] * b.data[i] : a.data[i] + sign_b * b.data[i];
  std::vector<double> a_data;
  std::vector<double> b_data;
  if (is_product) {
    a_data = a.data;
    b_data = b.data;
  }
  return make_node(
      tape, {&a, &b}, a.shape, std::move(out),
      [sign_b, is_product, a_data = std::move(a_data),
       b_data = std::move(b_data)](const std::vector<double>& gout,
                                   std::vector<std::vector<double>>& grads,
                                   const std::vector<int>& ids) {
        if (ids[0] >= 0) {
          auto& ga = grads[static_cast<std::size_t>(ids[0])];
          for (std::size_t i = 0; i < gout.size(); ++i)
            ga[i] += gout[i] * (is_product ? b_data[i] : 1.0);
        }
        if (ids[1] >= 0) {
          auto& gb = grads[static_cast<std::size_t>(ids[1])];
          for (std::size_t i = 0; i < gout.size(); ++i)
            gb[i] += gout[i] * (is_product ? a_data[i] : sign_b);
        }
      });
}

}  // namespace

Tensor add(GradTape& tape, const Tensor& a, const Tensor& b) {
  return binary_same_shape(tape, a, b, "add", 1.0, false);
}
Tensor sub(GradTape& tape, const Tensor& a, const Tensor& b) {
  return binary_same_shape(tape, a, b, "sub", -1.0, false);
}
Tensor mul(GradTape& tape, const Tensor& a, const Tensor& b) {
  return binary_same_shape(tape, a, b, "mul", 0.0, true);
}

Tensor scale(GradTape& tape, const Tensor& a, double c) {
  return unary_elementwise(
      tape, a, [c](double x) { return c * x; },
      [c](const std::vector<double>& x, const std::vector<double>&) {
        return std::vector<double>(x.size(), c);
      });
}

Tensor add_scalar(GradTape& tape, const Tensor& a, double c) {
  return unary_elementwise(
      tape, a, [c](double x) { return x + c; },
      [](const std::vector<double>& x, const std::vector<double>&) {
        return std::vector<double>(x.size(), 1.0);
      });
}

Tensor rsub_scalar(GradTape& tape, double c, const Tensor& a) {
  return unary_elementwise(
      tape, a, [c](double x) { return c - x; },
      [](const std::vector<double>& x, const std::vector<double>&) {
        return std::vector<double>(x.size(), -1.0);
      });
}

Tensor log(GradTape& tape, const Tensor& a) {
  return unary_elementwise(
      tape, a, [](double x) { return std::log(x); },
      [](const std::vector<double>& x, const std::vector<double>&) {
        std::vector<double> p(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) p[i] = 1.0 / x[i];
        return p;
      });
}

Tensor exp(GradTape& tape, const Tensor& a) {
  return unary_elementwise(
      tape, a, [](double x) { return std::exp(x); },
      [](const std::vector<double>&, const std::vector<double>& y) {
        return y;
      });
}

Tensor clamp(GradTape& tape, const Tensor& a, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("clamp: lo > hi");
  return unary_elementwise(
      tape, a,
      [lo, hi](double x) { return x < lo ? lo : (x > hi ? hi : x); },
      [lo, hi](const std::vector<double>& x, const std::vector<double>&) {
        std::vector<double> p(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
          p[i] = (x[i] >= lo && x[i] <= hi) ? 1.0 : 0.0;
        return p;
      });
}

Tensor sum_all(GradTape& tape, const Tensor& a) {
  double s = 0.0;
  for (double v : a.data) s += v;
  return make_node(tape, {&a}, {1}, {s},
                   [](const std::vector<double>& gout,
                      std::vector<std::vector<double>>& grads,
                      const std::vector<int>& ids) {
                     if (ids[0] < 0) return;
                     auto& ga = grads[static_cast<std::size_t>(ids[0])];
                     for (double& g : ga) g += gout[0];
                   });
}

Tensor mean_all(GradTape& tape, const Tensor& a) {
  const double inv = 1.0 / static_cast<double>(a.numel());
  double s = 0.0;
  for (double v : a.data) s += v;
  return make_node(tape, {&a}, {1}, {s * inv},
                   [inv](const std::vector<double>& gout,
                         std::vector<std::vector<double>>& grads,
                         const std::vector<int>& ids) {
                     if (ids[0] < 0) return;
                     auto& ga = grads[static_cast<std::size_t>(ids[0])];
                     for (double& g : ga) g += gout[0] * inv;
                   });
}

// Subgradient at the kink is 0; negative side of leaky uses its slope there.
Tensor relu(GradTape& tape, const Tensor& a) {
  return unary_elementwise(
      tape, a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](const std::vector<double>& x, const std::vector<double>&) {
        std::vector<double> p(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) p[i] = x[i] > 0.0 ? 1.0 : 0.0;
        return p;
      });
}

Tensor leaky_relu(GradTape& tape, const Tensor& a, double slope) {
  if (!(slope > 0.0))
    throw std::invalid_argument("leaky_relu: slope must be positive");
  return unary_elementwise(
      tape, a, [slope](double x) { return x > 0.0 ? x : slope * x; },
      [slope](const std::vector<double>& x, const std::vector<double>&) {
        std::vector<double> p(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
          p[i] = x[i] > 0.0 ? 1.0 : slope;
        return p;
      });
}

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Branches keep softplus exact for |x| > 30 where exp would over/underflow.
double stable_softplus(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

Tensor sigmoid(GradTape& tape, const Tensor& a) {
  return unary_elementwise(
      tape, a, stable_sigmoid,
      [](const std::vector<double>& x, const std::vector<double>& y) {
        std::vector<double> p(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) p[i] = y[i] * (1.0 - y[i]);
        return p;
      });
}

Tensor tanh(GradTape& tape, const Tensor& a) {
  return unary_elementwise(
      tape, a, [](double x) { return std::tanh(x); },
      [](const std::vector<double>& x, const std::vector<double>& y) {
        std::vector<double> p(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) p[i] = 1.0 - y[i] * y[i];
        return p;
      });
}

Tensor softplus(GradTape& tape, const Tensor& a) {
  return unary_elementwise(
      tape, a, stable_softplus,
      [](const std::vector<double>& x, const std::vector<double>&) {
        std::vector<double> p(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) p[i] = stable_sigmoid(x[i]);
        return p;
      });
}

Tensor gaussian_kernel_sum(GradTape& tape, const Tensor& x,
                           const std::vector<double>& samples, std::size_t d,
                           double sigma2, double scale) {
  if (x.shape.size() != 2 || x.rows() != 1 || x.cols() != d)
    throw std::invalid_argument("gaussian_kernel_sum: x must be (1, d)");
  if (d == 0 || samples.size() % d != 0)
    throw std::invalid_argument("gaussian_kernel_sum: bad sample block");
  if (!(sigma2 > 0.0))
    throw std::invalid_argument("gaussian_kernel_sum: sigma2 must be positive");
  const std::size_t n = samples.size() / d;
  const double inv2s = 1.0 / (2.0 * sigma2);
  double total = 0.0;
  // Accumulate sum_i e_i (y_i - x) for the adjoint while evaluating.
  std::vector<double> weighted_diff(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double q = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = x.data[j] - samples[i * d + j];
      q += diff * diff;
    }
    const double e = std::exp(-q * inv2s);
    total += e;
    for (std::size_t j = 0; j < d; ++j)
      weighted_diff[j] += e * (samples[i * d + j] - x.data[j]);
  }
  const double inv_s2 = 1.0 / sigma2;
  return make_node(
      tape, {&x}, {1}, {scale * total},
      [scale, inv_s2, weighted_diff = std::move(weighted_diff)](
          const std::vector<double>& gout,
          std::vector<std::vector<double>>& grads,
          const std::vector<int>& ids) {
        if (ids[0] < 0) return;
        auto& gx = grads[static_cast<std::size_t>(ids[0])];
        for (std::size_t j = 0; j < gx.size(); ++j)
          gx[j] += gout[0] * scale * weighted_diff[j] * inv_s2;
      });
}

}  // namespace ganlab
