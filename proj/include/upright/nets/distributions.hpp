#pragma once

#include "upright/common/rng.hpp"
#include "upright/nets/mlp.hpp"

namespace upright {

/// Diagonal Gaussian with a state-dependent mean and a state-independent
/// log standard deviation, the action distribution of the behavior policies.
struct GaussianPolicy {
  Mlp mean;
  VecX logStd;

  GaussianPolicy() = default;
  GaussianPolicy(std::vector<int> sizes, Activation act, double initLogStd = 0.0)
      : mean(std::move(sizes), act),
        logStd(VecX::Constant(mean.outputSize(), initLogStd)) {}

  int actionSize() const { return mean.outputSize(); }

  /// Draws mean + sigma * z; deterministic mode collapses sigma to zero.
  VecX sample(const VecX& obs, Rng& rng, bool deterministic = false) const;
};

double gaussianLogProb(const VecX& mean, const VecX& logStd, const VecX& action);

/// KL(p0 || p1) between diagonal Gaussians.
double gaussianKl(const VecX& mean0, const VecX& logStd0, const VecX& mean1,
                  const VecX& logStd1);

/// Numerically stable softmax and log-softmax.
VecX softmax(const VecX& logits);
VecX logSoftmax(const VecX& logits);

/// KL(p0 || p1) between categorical distributions given by logits.
double categoricalKl(const VecX& logits0, const VecX& logits1);

/// Three-way categorical over behaviors driven by a logits network.
struct CategoricalPolicy {
  Mlp logits;

  CategoricalPolicy() = default;
  CategoricalPolicy(std::vector<int> sizes, Activation act)
      : logits(std::move(sizes), act) {}

  int numClasses() const { return logits.outputSize(); }

  VecX probs(const VecX& obs) const { return softmax(logits.forward(obs)); }
  int sample(const VecX& obs, Rng& rng) const;
  int argmax(const VecX& obs) const;
};

}  // namespace upright
