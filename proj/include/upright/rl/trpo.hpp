#pragma once

#include <functional>
#include <vector>

#include "upright/nets/distributions.hpp"
#include "upright/nets/mlp.hpp"
#include "upright/rl/trajectory.hpp"

namespace upright {

/// Trust-region update hyper-parameters plus the value-fit schedule.
struct TrpoConfig {
  double klBound = 0.01;
  int cgIterations = 20;
  double cgTolerance = 1e-10;
  double damping = 0.1;
  int lineSearchSteps = 10;
  double backtrackRatio = 0.5;
  int valueEpochs = 30;
  double valueStep = 0.05;

  void validate() const;
};

/// Outcome of one policy update attempt. kl and surrogateGain describe the
/// last evaluated candidate, which is the new parameter point when accepted
/// and a discarded trial otherwise.
struct TrpoDiagnostics {
  bool accepted = false;
  bool gradientFinite = true;
  double kl = 0.0;
  double surrogateGain = 0.0;
  double stepScale = 0.0;  ///< accepted fraction of the full natural step
  double gradNorm = 0.0;
  double entropy = 0.0;    ///< at the returned parameters
};

/// Solves A x = b for symmetric positive definite A given only v -> A v.
VecX conjugateGradient(const std::function<VecX(const VecX&)>& applyA,
                       const VecX& b, int iterations, double tolerance = 1e-10);

/// Seam between a policy family and the trust-region engine. Construction
/// freezes the per-sample distributions at the current parameters as the
/// reference point. surrogateGradient and fisherVectorProduct are exact at
/// that snapshot and must be called before the live parameters move;
/// evaluate, klGradient, and entropy track the live parameters.
class PolicyBridge {
 public:
  virtual ~PolicyBridge() = default;

  virtual int paramCount() const = 0;
  virtual VecX params() const = 0;
  virtual void setParams(const VecX& flat) = 0;

  /// Mean over the batch of coeff_t * dlog pi(a_t | s_t) / dparams.
  virtual VecX surrogateGradient(const VecX& coeff) const = 0;

  /// Product of dir with the Hessian of the mean KL(snapshot || live),
  /// taken at the snapshot where it coincides with the Fisher matrix.
  virtual VecX fisherVectorProduct(const VecX& dir) const = 0;

  /// Mean KL(snapshot || live) and the importance-weighted surrogate
  /// mean_t(ratio_t * coeff_t) at the live parameters.
  virtual void evaluate(const VecX& coeff, double& klOut,
                        double& surrogateOut) const = 0;

  /// Gradient of the mean KL(snapshot || live) at the live parameters.
  virtual VecX klGradient() const = 0;

  /// Mean policy entropy at the live parameters.
  virtual double entropy() const = 0;
};

/// Gaussian behavior policy view. The flat parameter vector is the mean
/// network followed by logStd. Caches one forward trace per batch step, so
/// memory scales with batch size times network width.
class GaussianBridge final : public PolicyBridge {
 public:
  GaussianBridge(GaussianPolicy& policy, const TrajectoryBatch& batch);

  int paramCount() const override;
  VecX params() const override;
  void setParams(const VecX& flat) override;
  VecX surrogateGradient(const VecX& coeff) const override;
  VecX fisherVectorProduct(const VecX& dir) const override;
  void evaluate(const VecX& coeff, double& klOut,
                double& surrogateOut) const override;
  VecX klGradient() const override;
  double entropy() const override;

 private:
  GaussianPolicy& policy_;
  const TrajectoryBatch& batch_;
  std::vector<Mlp::Trace> traces_;
  std::vector<VecX> snapMeans_;
  VecX snapLogStd_;
  VecX snapVar_;
  std::vector<double> refLogProbs_;
};

/// Categorical selector policy view over the logits network parameters.
class CategoricalBridge final : public PolicyBridge {
 public:
  CategoricalBridge(CategoricalPolicy& policy, const TrajectoryBatch& batch);

  int paramCount() const override;
  VecX params() const override;
  void setParams(const VecX& flat) override;
  VecX surrogateGradient(const VecX& coeff) const override;
  VecX fisherVectorProduct(const VecX& dir) const override;
  void evaluate(const VecX& coeff, double& klOut,
                double& surrogateOut) const override;
  VecX klGradient() const override;
  double entropy() const override;

 private:
  int actionIndex(int t) const;

  CategoricalPolicy& policy_;
  const TrajectoryBatch& batch_;
  std::vector<Mlp::Trace> traces_;
  std::vector<VecX> snapLogits_;
  std::vector<VecX> snapProbs_;
  std::vector<double> refLogProbs_;
};

/// One natural-gradient update with backtracking line search. The step is
/// accepted only if the empirical KL stays within the bound and the
/// surrogate improves; otherwise the parameters are restored bit for bit.
TrpoDiagnostics trustRegionUpdate(PolicyBridge& bridge, const VecX& advantages,
                                  const TrpoConfig& cfg);

/// Full policy update on a collected batch: refreshes value estimates from
/// valueFn when the batch carries none, computes advantages, and runs the
/// trust-region step.
TrpoDiagnostics trpoStep(GaussianPolicy& policy, const Mlp& valueFn,
                         TrajectoryBatch& batch, const TrpoConfig& cfg);
TrpoDiagnostics trpoStep(CategoricalPolicy& policy, const Mlp& valueFn,
                         TrajectoryBatch& batch, const TrpoConfig& cfg);

/// Regresses the value network onto the advantage targets of the batch by
/// full-batch gradient descent with step halving, so the recorded loss trace
/// never increases. Returns the mean squared error before training and after
/// each committed epoch.
std::vector<double> fitValue(Mlp& valueFn, const TrajectoryBatch& batch,
                             const TrpoConfig& cfg);

}  // namespace upright
