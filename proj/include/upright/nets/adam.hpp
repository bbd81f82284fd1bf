#pragma once

#include <cmath>

#include "upright/physics/types.hpp"

namespace upright {

/// Adam over a flat parameter vector, with bias-corrected moments.
class Adam {
 public:
  explicit Adam(int paramCount, double learningRate = 1e-3,
                double beta1 = 0.9, double beta2 = 0.999,
                double epsilon = 1e-8)
      : lr_(learningRate),
        beta1_(beta1),
        beta2_(beta2),
        eps_(epsilon),
        m_(VecX::Zero(paramCount)),
        v_(VecX::Zero(paramCount)) {}

  VecX step(const VecX& params, const VecX& grad) {
    ++t_;
    m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
    v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
    const double mScale = 1.0 / (1.0 - std::pow(beta1_, t_));
    const double vScale = 1.0 / (1.0 - std::pow(beta2_, t_));
    const VecX update =
        (m_ * mScale).cwiseQuotient(((v_ * vScale).cwiseSqrt().array() + eps_).matrix());
    return params - lr_ * update;
  }

 private:
  double lr_, beta1_, beta2_, eps_;
  int t_ = 0;
  VecX m_, v_;
};

}  // namespace upright
