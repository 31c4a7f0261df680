#include "ganlab/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace ganlab {

Optimizer::Optimizer(Kind k, double lr, double b1, double b2, double eps)
    : kind_(k), lr_(lr), beta1_(b1), beta2_(b2), eps_(eps) {
  if (!(lr > 0.0)) throw std::invalid_argument("optimizer: lr must be > 0");
  if (k == Kind::adam) {
    if (!(b1 >= 0.0 && b1 < 1.0 && b2 >= 0.0 && b2 < 1.0))
      throw std::invalid_argument("adam: betas must lie in [0, 1)");
    if (!(eps > 0.0)) throw std::invalid_argument("adam: eps must be > 0");
  }
}

Optimizer Optimizer::sgd(double lr) { return Optimizer(Kind::sgd, lr, 0, 0, 0); }

Optimizer Optimizer::adam(double lr, double beta1, double beta2, double eps) {
  return Optimizer(Kind::adam, lr, beta1, beta2, eps);
}

void Optimizer::step(
    const std::vector<std::pair<std::string, Tensor*>>& params,
    const std::vector<const std::vector<double>*>& grads) {
  if (params.size() != grads.size())
    throw std::invalid_argument("optimizer: params/grads size mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i]->size() != params[i].second->numel())
      throw std::invalid_argument("optimizer: gradient for " +
                                  params[i].first + " has wrong length");
    for (double g : *grads[i])
      if (std::isnan(g))
        throw std::runtime_error("optimizer: NaN gradient in parameter " +
                                 params[i].first);
  }

  if (kind_ == Kind::sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto& data = params[i].second->data;
      const auto& g = *grads[i];
      for (std::size_t j = 0; j < data.size(); ++j) data[j] -= lr_ * g[j];
    }
    return;
  }

  if (m_.empty()) {
    m_.resize(params.size());
    v_.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i].assign(params[i].second->numel(), 0.0);
      v_[i].assign(params[i].second->numel(), 0.0);
    }
  }
  if (m_.size() != params.size())
    throw std::invalid_argument("adam: parameter list changed between steps");

  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& data = params[i].second->data;
    const auto& g = *grads[i];
    if (m_[i].size() != data.size())
      throw std::invalid_argument("adam: moment buffer for " + params[i].first +
                                  " does not match parameter shape");
    for (std::size_t j = 0; j < data.size(); ++j) {
      m_[i][j] = beta1_ * m_[i][j] + (1.0 - beta1_) * g[j];
      v_[i][j] = beta2_ * v_[i][j] + (1.0 - beta2_) * g[j] * g[j];
      const double mhat = m_[i][j] / bc1;
      const double vhat = v_[i][j] / bc2;
      data[j] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

void Optimizer::step(Mlp& net, const GradientMap& grads,
                     const MlpParamsHandle& handle) {
  auto params = net.parameters();
  if (handle.params.size() != params.size())
    throw std::invalid_argument("optimizer: handle does not match net");
  std::vector<const std::vector<double>*> gs;
  gs.reserve(params.size());
  for (const Tensor& leaf : handle.params) gs.push_back(&grads.at(leaf));
  step(params, gs);
}

}  // namespace ganlab
