#include "upright/nets/distributions.hpp"

#include <cmath>
#include <stdexcept>

namespace upright {

VecX GaussianPolicy::sample(const VecX& obs, Rng& rng,
                            bool deterministic) const {
  VecX a = mean.forward(obs);
  if (!deterministic) {
    for (int i = 0; i < a.size(); ++i)
      a[i] += std::exp(logStd[i]) * rng.normal();
  }
  return a;
}

double gaussianLogProb(const VecX& mean, const VecX& logStd,
                       const VecX& action) {
  if (mean.size() != logStd.size() || mean.size() != action.size())
    throw std::invalid_argument("gaussian dimension mismatch");
  double lp = -0.5 * mean.size() * std::log(2.0 * M_PI);
  for (int i = 0; i < mean.size(); ++i) {
    const double z = (action[i] - mean[i]) * std::exp(-logStd[i]);
    lp -= 0.5 * z * z + logStd[i];
  }
  return lp;
}

double gaussianKl(const VecX& mean0, const VecX& logStd0, const VecX& mean1,
                  const VecX& logStd1) {
  if (mean0.size() != mean1.size() || logStd0.size() != logStd1.size() ||
      mean0.size() != logStd0.size())
    throw std::invalid_argument("gaussian dimension mismatch");
  double kl = 0.0;
  for (int i = 0; i < mean0.size(); ++i) {
    const double var0 = std::exp(2.0 * logStd0[i]);
    const double var1 = std::exp(2.0 * logStd1[i]);
    const double dm = mean0[i] - mean1[i];
    kl += logStd1[i] - logStd0[i] + (var0 + dm * dm) / (2.0 * var1) - 0.5;
  }
  return kl;
}

VecX softmax(const VecX& logits) {
  const double m = logits.maxCoeff();
  VecX e = (logits.array() - m).exp();
  return e / e.sum();
}

VecX logSoftmax(const VecX& logits) {
  const double m = logits.maxCoeff();
  const double lse = m + std::log((logits.array() - m).exp().sum());
  return logits.array() - lse;
}

double categoricalKl(const VecX& logits0, const VecX& logits1) {
  if (logits0.size() != logits1.size())
    throw std::invalid_argument("categorical dimension mismatch");
  const VecX p = softmax(logits0);
  const VecX lp0 = logSoftmax(logits0);
  const VecX lp1 = logSoftmax(logits1);
  double kl = 0.0;
  for (int i = 0; i < p.size(); ++i) kl += p[i] * (lp0[i] - lp1[i]);
  return kl;
}

int CategoricalPolicy::sample(const VecX& obs, Rng& rng) const {
  const VecX p = probs(obs);
  double u = rng.uniform(0.0, 1.0);
  for (int i = 0; i < p.size(); ++i) {
    u -= p[i];
    if (u <= 0.0) return i;
  }
  return static_cast<int>(p.size()) - 1;
}

int CategoricalPolicy::argmax(const VecX& obs) const {
  const VecX p = probs(obs);
  int best = 0;
  for (int i = 1; i < p.size(); ++i)
    if (p[i] > p[best]) best = i;
  return best;
}

}  // namespace upright
