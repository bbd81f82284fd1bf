#include <cmath>
#include <stdexcept>

#include "upright/rl/trpo.hpp"

namespace upright {

void TrpoConfig::validate() const {
  if (!(klBound > 0.0)) throw std::invalid_argument("klBound must be > 0");
  if (cgIterations < 1) throw std::invalid_argument("cgIterations must be >= 1");
  if (!(cgTolerance >= 0.0)) throw std::invalid_argument("cgTolerance must be >= 0");
  if (!(damping >= 0.0)) throw std::invalid_argument("damping must be >= 0");
  if (lineSearchSteps < 1) throw std::invalid_argument("lineSearchSteps must be >= 1");
  if (!(backtrackRatio > 0.0 && backtrackRatio < 1.0)) {
    throw std::invalid_argument("backtrackRatio must lie in (0, 1)");
  }
  if (valueEpochs < 0) throw std::invalid_argument("valueEpochs must be >= 0");
  if (!(valueStep > 0.0)) throw std::invalid_argument("valueStep must be > 0");
}

VecX conjugateGradient(const std::function<VecX(const VecX&)>& applyA,
                       const VecX& b, int iterations, double tolerance) {
  VecX x = VecX::Zero(b.size());
  VecX r = b;
  VecX p = r;
  double rsOld = r.squaredNorm();
  if (std::sqrt(rsOld) < tolerance) return x;
  for (int i = 0; i < iterations; ++i) {
    const VecX ap = applyA(p);
    const double pap = p.dot(ap);
    if (!(pap > 0.0) || !std::isfinite(pap)) break;
    const double alpha = rsOld / pap;
    x += alpha * p;
    r -= alpha * ap;
    const double rsNew = r.squaredNorm();
    if (std::sqrt(rsNew) < tolerance) break;
    p = r + (rsNew / rsOld) * p;
    rsOld = rsNew;
  }
  return x;
}

GaussianBridge::GaussianBridge(GaussianPolicy& policy,
                               const TrajectoryBatch& batch)
    : policy_(policy), batch_(batch) {
  batch.validate();
  const int n = batch.size();
  if (n == 0) throw std::invalid_argument("empty trajectory batch");
  snapLogStd_ = policy.logStd;
  snapVar_ = (2.0 * snapLogStd_.array()).exp();
  traces_.resize(n);
  snapMeans_.resize(n);
  refLogProbs_.resize(n);
  for (int t = 0; t < n; ++t) {
    if (batch.actions[t].size() != policy.actionSize()) {
      throw std::invalid_argument("action dimension mismatch");
    }
    snapMeans_[t] = policy.mean.forward(batch.observations[t], traces_[t]);
    refLogProbs_[t] =
        gaussianLogProb(snapMeans_[t], snapLogStd_, batch.actions[t]);
  }
}

int GaussianBridge::paramCount() const {
  return policy_.mean.paramCount() + policy_.actionSize();
}

VecX GaussianBridge::params() const {
  VecX out(paramCount());
  out.head(policy_.mean.paramCount()) = policy_.mean.params();
  out.tail(policy_.actionSize()) = policy_.logStd;
  return out;
}

void GaussianBridge::setParams(const VecX& flat) {
  policy_.mean.setParams(flat.head(policy_.mean.paramCount()));
  policy_.logStd = flat.tail(policy_.actionSize());
}

VecX GaussianBridge::surrogateGradient(const VecX& coeff) const {
  const int n = batch_.size();
  const int mp = policy_.mean.paramCount();
  VecX gMean = VecX::Zero(mp);
  VecX gLogStd = VecX::Zero(policy_.actionSize());
  for (int t = 0; t < n; ++t) {
    const VecX diff = batch_.actions[t] - snapMeans_[t];
    const VecX scaled = diff.cwiseQuotient(snapVar_);
    gMean += policy_.mean.backward(traces_[t], coeff(t) * scaled);
    gLogStd += coeff(t) * (diff.cwiseProduct(scaled).array() - 1.0).matrix();
  }
  VecX out(paramCount());
  out.head(mp) = gMean / n;
  out.tail(policy_.actionSize()) = gLogStd / n;
  return out;
}

VecX GaussianBridge::fisherVectorProduct(const VecX& dir) const {
  const int n = batch_.size();
  const int mp = policy_.mean.paramCount();
  const VecX dirMean = dir.head(mp);
  VecX acc = VecX::Zero(mp);
  for (int t = 0; t < n; ++t) {
    const VecX dMean = policy_.mean.jvp(traces_[t], dirMean);
    acc += policy_.mean.backward(traces_[t], dMean.cwiseQuotient(snapVar_));
  }
  VecX out(paramCount());
  out.head(mp) = acc / n;
  out.tail(policy_.actionSize()) = 2.0 * dir.tail(policy_.actionSize());
  return out;
}

void GaussianBridge::evaluate(const VecX& coeff, double& klOut,
                              double& surrogateOut) const {
  const int n = batch_.size();
  double kl = 0.0;
  double sur = 0.0;
  for (int t = 0; t < n; ++t) {
    const VecX mean = policy_.mean.forward(batch_.observations[t]);
    kl += gaussianKl(snapMeans_[t], snapLogStd_, mean, policy_.logStd);
    const double lp = gaussianLogProb(mean, policy_.logStd, batch_.actions[t]);
    sur += std::exp(lp - refLogProbs_[t]) * coeff(t);
  }
  klOut = kl / n;
  surrogateOut = sur / n;
}

VecX GaussianBridge::klGradient() const {
  const int n = batch_.size();
  const int mp = policy_.mean.paramCount();
  const VecX var = (2.0 * policy_.logStd.array()).exp();
  VecX gMean = VecX::Zero(mp);
  VecX gLogStd = VecX::Zero(policy_.actionSize());
  for (int t = 0; t < n; ++t) {
    Mlp::Trace trace;
    const VecX mean = policy_.mean.forward(batch_.observations[t], trace);
    const VecX diff = mean - snapMeans_[t];
    gMean += policy_.mean.backward(trace, diff.cwiseQuotient(var));
    gLogStd +=
        (1.0 - (snapVar_.array() + diff.array().square()) / var.array())
            .matrix();
  }
  VecX out(paramCount());
  out.head(mp) = gMean / n;
  out.tail(policy_.actionSize()) = gLogStd / n;
  return out;
}

double GaussianBridge::entropy() const {
  const double perDim = 0.5 * (1.0 + std::log(2.0 * M_PI));
  return policy_.actionSize() * perDim + policy_.logStd.sum();
}

CategoricalBridge::CategoricalBridge(CategoricalPolicy& policy,
                                     const TrajectoryBatch& batch)
    : policy_(policy), batch_(batch) {
  batch.validate();
  const int n = batch.size();
  if (n == 0) throw std::invalid_argument("empty trajectory batch");
  traces_.resize(n);
  snapLogits_.resize(n);
  snapProbs_.resize(n);
  refLogProbs_.resize(n);
  for (int t = 0; t < n; ++t) {
    const int a = actionIndex(t);
    if (a < 0 || a >= policy.numClasses()) {
      throw std::invalid_argument("class index out of range");
    }
    snapLogits_[t] = policy.logits.forward(batch.observations[t], traces_[t]);
    snapProbs_[t] = softmax(snapLogits_[t]);
    refLogProbs_[t] = logSoftmax(snapLogits_[t])(a);
  }
}

int CategoricalBridge::actionIndex(int t) const {
  if (batch_.actions[t].size() != 1) {
    throw std::invalid_argument("discrete actions must be one-element vectors");
  }
  return static_cast<int>(std::lround(batch_.actions[t](0)));
}

int CategoricalBridge::paramCount() const {
  return policy_.logits.paramCount();
}

VecX CategoricalBridge::params() const { return policy_.logits.params(); }

void CategoricalBridge::setParams(const VecX& flat) {
  policy_.logits.setParams(flat);
}

VecX CategoricalBridge::surrogateGradient(const VecX& coeff) const {
  const int n = batch_.size();
  VecX grad = VecX::Zero(paramCount());
  for (int t = 0; t < n; ++t) {
    VecX w = -coeff(t) * snapProbs_[t];
    w(actionIndex(t)) += coeff(t);
    grad += policy_.logits.backward(traces_[t], w);
  }
  return grad / n;
}

VecX CategoricalBridge::fisherVectorProduct(const VecX& dir) const {
  const int n = batch_.size();
  VecX acc = VecX::Zero(paramCount());
  for (int t = 0; t < n; ++t) {
    const VecX dl = policy_.logits.jvp(traces_[t], dir);
    const VecX w =
        snapProbs_[t].cwiseProduct(dl) - snapProbs_[t].dot(dl) * snapProbs_[t];
    acc += policy_.logits.backward(traces_[t], w);
  }
  return acc / n;
}

void CategoricalBridge::evaluate(const VecX& coeff, double& klOut,
                                 double& surrogateOut) const {
  const int n = batch_.size();
  double kl = 0.0;
  double sur = 0.0;
  for (int t = 0; t < n; ++t) {
    const VecX logits = policy_.logits.forward(batch_.observations[t]);
    kl += categoricalKl(snapLogits_[t], logits);
    const double lp = logSoftmax(logits)(actionIndex(t));
    sur += std::exp(lp - refLogProbs_[t]) * coeff(t);
  }
  klOut = kl / n;
  surrogateOut = sur / n;
}

VecX CategoricalBridge::klGradient() const {
  const int n = batch_.size();
  VecX grad = VecX::Zero(paramCount());
  for (int t = 0; t < n; ++t) {
    Mlp::Trace trace;
    const VecX logits = policy_.logits.forward(batch_.observations[t], trace);
    grad += policy_.logits.backward(trace, softmax(logits) - snapProbs_[t]);
  }
  return grad / n;
}

double CategoricalBridge::entropy() const {
  const int n = batch_.size();
  double acc = 0.0;
  for (int t = 0; t < n; ++t) {
    const VecX logits = policy_.logits.forward(batch_.observations[t]);
    const VecX logp = logSoftmax(logits);
    acc -= logp.array().exp().matrix().dot(logp);
  }
  return acc / n;
}

TrpoDiagnostics trustRegionUpdate(PolicyBridge& bridge, const VecX& advantages,
                                  const TrpoConfig& cfg) {
  cfg.validate();
  TrpoDiagnostics d;

  const VecX g = bridge.surrogateGradient(advantages);
  if (!g.allFinite()) {
    d.gradientFinite = false;
    return d;
  }
  d.gradNorm = g.norm();
  if (d.gradNorm < 1e-12) {
    d.entropy = bridge.entropy();
    return d;
  }

  const auto damped = [&](const VecX& v) {
    return VecX(bridge.fisherVectorProduct(v) + cfg.damping * v);
  };
  const VecX dir = conjugateGradient(damped, g, cfg.cgIterations, cfg.cgTolerance);
  const double quad = dir.dot(damped(dir));
  if (!(quad > 0.0) || !std::isfinite(quad)) {
    d.entropy = bridge.entropy();
    return d;
  }
  const double fullStep = std::sqrt(2.0 * cfg.klBound / quad);

  const VecX theta0 = bridge.params();
  double kl0 = 0.0;
  double surrogate0 = 0.0;
  bridge.evaluate(advantages, kl0, surrogate0);

  double scale = 1.0;
  for (int k = 0; k < cfg.lineSearchSteps; ++k, scale *= cfg.backtrackRatio) {
    bridge.setParams(theta0 + (fullStep * scale) * dir);
    double kl = 0.0;
    double surrogate = 0.0;
    bridge.evaluate(advantages, kl, surrogate);
    d.kl = kl;
    d.surrogateGain = surrogate - surrogate0;
    if (std::isfinite(kl) && std::isfinite(surrogate) && kl <= cfg.klBound &&
        d.surrogateGain > 0.0) {
      d.accepted = true;
      d.stepScale = scale;
      d.entropy = bridge.entropy();
      return d;
    }
  }

  bridge.setParams(theta0);
  d.entropy = bridge.entropy();
  return d;
}

namespace {

void refreshValues(const Mlp& valueFn, TrajectoryBatch& batch) {
  if (batch.values.empty()) fillValues(batch, valueFn);
}

}  // namespace

TrpoDiagnostics trpoStep(GaussianPolicy& policy, const Mlp& valueFn,
                         TrajectoryBatch& batch, const TrpoConfig& cfg) {
  cfg.validate();
  refreshValues(valueFn, batch);
  const GaeResult gae = computeGae(batch);
  GaussianBridge bridge(policy, batch);
  return trustRegionUpdate(bridge, gae.advantages, cfg);
}

TrpoDiagnostics trpoStep(CategoricalPolicy& policy, const Mlp& valueFn,
                         TrajectoryBatch& batch, const TrpoConfig& cfg) {
  cfg.validate();
  refreshValues(valueFn, batch);
  const GaeResult gae = computeGae(batch);
  CategoricalBridge bridge(policy, batch);
  return trustRegionUpdate(bridge, gae.advantages, cfg);
}

std::vector<double> fitValue(Mlp& valueFn, const TrajectoryBatch& batch,
                             const TrpoConfig& cfg) {
  cfg.validate();
  if (valueFn.outputSize() != 1) {
    throw std::invalid_argument("value network must have one output");
  }
  const GaeResult gae = computeGae(batch);
  const int n = batch.size();

  const auto loss = [&]() {
    double acc = 0.0;
    for (int t = 0; t < n; ++t) {
      const double e =
          valueFn.forward(batch.observations[t])(0) - gae.valueTargets(t);
      acc += e * e;
    }
    return acc / n;
  };

  std::vector<double> trace;
  trace.push_back(loss());
  VecX theta = valueFn.params();
  for (int epoch = 0; epoch < cfg.valueEpochs; ++epoch) {
    VecX grad = VecX::Zero(valueFn.paramCount());
    for (int t = 0; t < n; ++t) {
      Mlp::Trace tr;
      const double out = valueFn.forward(batch.observations[t], tr)(0);
      VecX og(1);
      og(0) = 2.0 * (out - gae.valueTargets(t)) / n;
      grad += valueFn.backward(tr, og);
    }
    if (!grad.allFinite()) break;

    double step = cfg.valueStep;
    bool moved = false;
    for (int attempt = 0; attempt < 12; ++attempt, step *= 0.5) {
      valueFn.setParams(theta - step * grad);
      const double candidate = loss();
      if (std::isfinite(candidate) && candidate < trace.back()) {
        theta = valueFn.params();
        trace.push_back(candidate);
        moved = true;
        break;
      }
    }
    if (!moved) {
      valueFn.setParams(theta);
      break;
    }
  }
  return trace;
}

}  // namespace upright
