#pragma once

#include <string>
#include <vector>

#include "ganlab/nn.hpp"
#include "ganlab/tensor.hpp"

namespace ganlab {

// First-order parameter updates. Adam keeps per-parameter moment buffers
// shaped like their parameters and applies the usual bias correction.
class Optimizer {
 public:
  enum class Kind { sgd, adam };

  static Optimizer sgd(double lr);
  static Optimizer adam(double lr, double beta1 = 0.9, double beta2 = 0.999,
                        double eps = 1e-8);

  Kind kind() const { return kind_; }
  double learning_rate() const { return lr_; }

  // In-place update of `params` by `grads` (aligned, same order). Throws on
  // NaN gradients, naming the offending parameter.
  void step(const std::vector<std::pair<std::string, Tensor*>>& params,
            const std::vector<const std::vector<double>*>& grads);

  // Convenience for a net whose forward was recorded through `handle`.
  void step(Mlp& net, const GradientMap& grads, const MlpParamsHandle& handle);

 private:
  Optimizer(Kind k, double lr, double b1, double b2, double eps);

  Kind kind_;
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;  // adam step count
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace ganlab
