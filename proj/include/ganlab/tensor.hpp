#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ganlab {

// Dense row-major 64-bit tensor. `node >= 0` means the value is recorded on
// the tape with serial `tape_serial`, so gradients can be looked up for it
// after a backward pass. Detached tensors (node == -1) act as constants.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;
  int node = -1;
  std::uint64_t tape_serial = 0;

  Tensor() = default;
  Tensor(std::vector<std::size_t> shape_in, std::vector<double> data_in);

  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor full(std::vector<std::size_t> shape, double value);
  static Tensor scalar(double value);
  // Single row, shape {1, n}.
  static Tensor row(std::vector<double> values);
  static Tensor matrix(std::size_t rows, std::size_t cols,
                       std::vector<double> values);

  std::size_t numel() const;
  std::size_t rows() const;
  std::size_t cols() const;
  bool is_scalar() const { return numel() == 1; }
  double item() const;  // throws unless numel() == 1
  double& at(std::size_t r, std::size_t c);
  double at(std::size_t r, std::size_t c) const;
  bool all_finite() const;
  std::string shape_str() const;

  Tensor detached() const;
};

class GradTape;

// Gradients for every node of one tape, produced by GradTape::backward.
class GradientMap {
 public:
  const std::vector<double>& at(const Tensor& t) const;
  bool contains(const Tensor& t) const;
  double l2_norm(const Tensor& t) const;

 private:
  friend class GradTape;
  std::vector<std::vector<double>> by_node_;
  std::uint64_t tape_serial_ = 0;
};

// Append-only record of one forward computation. Nodes hold their parents
// and a closure that scatters the incoming gradient to them; parents always
// precede children, so one reverse sweep settles every adjoint. A tape is
// consumed by backward() and cannot be reused.
class GradTape {
 public:
  using BackwardFn =
      std::function<void(const std::vector<double>& out_grad,
                         std::vector<std::vector<double>>& node_grads)>;

  GradTape();
  GradTape(const GradTape&) = delete;
  GradTape& operator=(const GradTape&) = delete;
  GradTape(GradTape&&) = default;
  GradTape& operator=(GradTape&&) = default;

  // Registers `value` as a leaf so its gradient is retrievable later.
  Tensor watch(const Tensor& value);

  // Low-level node insertion used by the op library. Returns the node id.
  int record(std::vector<int> parents, std::size_t out_numel, BackwardFn fn);

  GradientMap backward(const Tensor& loss);

  std::uint64_t serial() const { return serial_; }
  std::size_t node_count() const { return nodes_.size(); }
  bool consumed() const { return consumed_; }

  // Asserts that `t` either is detached or belongs to this tape.
  void check_membership(const Tensor& t, const char* what) const;

 private:
  struct Node {
    std::vector<int> parents;
    std::size_t numel;
    BackwardFn fn;
  };
  std::vector<Node> nodes_;
  std::uint64_t serial_;
  bool consumed_ = false;
};

// --- recorded tensor ops -------------------------------------------------
// Every op accepts detached inputs (treated as constants) and produces a
// tensor on `tape` whenever at least one input is recorded; ops on fully
// detached inputs still return a recorded node so losses built from
// constants stay differentiable-by-construction (gradient simply stops).

Tensor matmul(GradTape& tape, const Tensor& a, const Tensor& b);
// Adds a {1, m} bias row to every row of a {n, m} tensor.
Tensor add_rowwise(GradTape& tape, const Tensor& a, const Tensor& bias);
Tensor add(GradTape& tape, const Tensor& a, const Tensor& b);
Tensor sub(GradTape& tape, const Tensor& a, const Tensor& b);
Tensor mul(GradTape& tape, const Tensor& a, const Tensor& b);
Tensor scale(GradTape& tape, const Tensor& a, double c);
Tensor add_scalar(GradTape& tape, const Tensor& a, double c);
// c - a, elementwise.
Tensor rsub_scalar(GradTape& tape, double c, const Tensor& a);
Tensor log(GradTape& tape, const Tensor& a);
Tensor exp(GradTape& tape, const Tensor& a);
// Clamp with zero gradient outside [lo, hi].
Tensor clamp(GradTape& tape, const Tensor& a, double lo, double hi);
Tensor sum_all(GradTape& tape, const Tensor& a);
Tensor mean_all(GradTape& tape, const Tensor& a);

Tensor relu(GradTape& tape, const Tensor& a);
Tensor leaky_relu(GradTape& tape, const Tensor& a, double slope);
Tensor sigmoid(GradTape& tape, const Tensor& a);
Tensor tanh(GradTape& tape, const Tensor& a);
Tensor softplus(GradTape& tape, const Tensor& a);

// scale * sum_i exp(-|x - y_i|^2 / (2 sigma2)) for a {1, d} input and a flat
// row-major (n, d) sample block. One node regardless of n; used to express
// kernel density estimates inside recorded graphs.
Tensor gaussian_kernel_sum(GradTape& tape, const Tensor& x,
                           const std::vector<double>& samples, std::size_t d,
                           double sigma2, double scale);

// Detached numeric helpers shared across modules.
double stable_sigmoid(double x);
double stable_softplus(double x);

}  // namespace ganlab
