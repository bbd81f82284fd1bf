#pragma once

#include <array>
#include <string>
#include <vector>

#include "upright/behaviors/task.hpp"
#include "upright/env/environment.hpp"
#include "upright/nets/distributions.hpp"
#include "upright/rl/trpo.hpp"
#include "upright/selector/replay.hpp"

namespace upright {

/// Knobs specific to the selector and its concurrently trained height
/// estimator. The warm-up follows the training pseudocode literally: the
/// estimate replaces the true height in observations from the first
/// iteration strictly after warmupIterations.
struct SelectorConfig {
  int warmupIterations = 20;
  int regressionBatch = 4096;  ///< replay pairs fit per iteration
  int replayCapacity = 200000;
  double rateHz = 50.0;  ///< decision rate, fixed by the task table
  std::vector<int> estimatorHiddenSizes{128, 128};
  double estimatorStep = 0.05;  ///< regression descent step before halving
  int estimatorEpochs = 30;     ///< committed descent epochs per iteration

  void validate() const;  ///< throws std::invalid_argument on bad values
};

struct TrainSelectorConfig {
  SelectorConfig selector{};
  int iterations = 100;
  int stepsPerIteration = 4000;  ///< selector decisions gathered per update
  int numEnvs = 8;
  std::vector<int> hiddenSizes;  ///< selector logits net; empty = task default
  std::vector<int> valueHiddenSizes{64, 64};
  double policyInitScale = 0.01;  ///< near-uniform initial distribution
  double gamma = 0.99;
  double lambda = 0.95;
  int checkpointEvery = 0;
  uint64_t seed = 1;
  std::string outputDir;        ///< empty = write no files
  std::string actuatorNetPath;  ///< empty = analytic drive
  /// Starting height estimator; empty = fresh random init. Combined with
  /// estimatorEpochs = 0 this freezes the estimator, which makes the warm-up
  /// gate observable from the logged height column.
  Mlp initialEstimator{};
  TrpoConfig trpo{};
  EnvConfig env{};  ///< start from defaultEnvConfig(Selector)

  void validate() const;  ///< throws std::invalid_argument on bad values
};

struct SelectorIterationStats {
  int iteration = 0;
  double meanReturn = 0.0;
  double meanEpisodeLength = 0.0;
  int episodes = 0;
  double kl = 0.0;
  double surrogateGain = 0.0;
  double stepScale = 0.0;
  double entropy = 0.0;
  double valueLoss = 0.0;
  double regressionLossBefore = 0.0;  ///< batch MSE entering the fit
  double regressionLossAfter = 0.0;   ///< batch MSE after the committed epochs
  double meanObservedHeight = 0.0;    ///< height feature as the policy saw it
  bool usingEstimate = false;         ///< past the warm-up gate
  double curriculum = 0.0;
  bool accepted = false;
};

struct TrainSelectorResult {
  CategoricalPolicy selector;
  Mlp valueFunction;
  Mlp heightEstimator;
  std::vector<SelectorIterationStats> log;
  bool diverged = false;
  std::string note;  ///< diagnostic when diverged
};

/// Trains the categorical selector over the three fixed behaviors while
/// regressing the height estimator on replayed observation-height pairs.
/// Observations carry the true height through the warm-up iterations and the
/// live estimate afterwards. Deterministic per seed. When outputDir is set,
/// writes selector.net, height_estimator.net, value.net, and a JSONL log.
TrainSelectorResult trainSelector(const std::array<GaussianPolicy, 3>& behaviors,
                                  const RobotModel& model,
                                  const TrainSelectorConfig& cfg);

enum class SelectMode { Sample, Argmax };

struct BehaviorChoice {
  int behavior = 0;
  VecX probabilities;  ///< softmax output, one entry per behavior
};

/// One selector decision. Argmax breaks ties toward the lowest index; sample
/// mode draws from the distribution and requires an rng.
BehaviorChoice selectBehavior(const CategoricalPolicy& selector, const VecX& obs,
                              SelectMode mode, Rng* rng = nullptr);

/// Single estimator forward pass; obs must match the estimator input layout.
double estimateHeight(const Mlp& estimator, const VecX& obs);

struct SelectorDecision {
  double time = 0.0;
  VecX probabilities;
  int behavior = 0;
};

/// CSV rows of time, the class probabilities, and the chosen id, the data
/// behind behavior-bar plots.
void writeDecisionLog(const std::string& path,
                      const std::vector<SelectorDecision>& rows);

}  // namespace upright
