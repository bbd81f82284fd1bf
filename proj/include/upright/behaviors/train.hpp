#pragma once

#include <string>
#include <vector>

#include "upright/behaviors/task.hpp"
#include "upright/env/environment.hpp"
#include "upright/nets/distributions.hpp"
#include "upright/rl/trpo.hpp"

namespace upright {

struct TrainBehaviorConfig {
  int iterations = 200;
  int stepsPerIteration = 8000;  ///< control steps gathered per update
  int numEnvs = 8;               ///< rollout streams, run serially
  std::vector<int> hiddenSizes;  ///< policy; empty = the task's default
  std::vector<int> valueHiddenSizes{64, 64};
  double initLogStd = 0.0;
  double policyInitScale = 0.1;  ///< output layer scale at init
  double gamma = 0.99;
  double lambda = 0.95;
  int checkpointEvery = 0;  ///< iterations between saved policies, 0 = final only
  uint64_t seed = 1;
  std::string outputDir;        ///< empty = write no files
  std::string actuatorNetPath;  ///< empty = analytic drive
  TrpoConfig trpo{};
  EnvConfig env{};  ///< start from defaultEnvConfig(task)

  void validate() const;  ///< throws std::invalid_argument on bad values
};

struct IterationStats {
  int iteration = 0;
  double meanReturn = 0.0;         ///< over episodes completed this wave
  double meanEpisodeLength = 0.0;  ///< control steps
  int episodes = 0;                ///< completed episodes this wave
  double kl = 0.0;
  double surrogateGain = 0.0;
  double stepScale = 0.0;
  double entropy = 0.0;
  double valueLoss = 0.0;  ///< mean squared error after the value fit
  double curriculum = 0.0;
  bool accepted = false;
};

struct TrainBehaviorResult {
  GaussianPolicy policy;
  Mlp valueFunction;
  std::vector<IterationStats> log;
  bool diverged = false;
  std::string note;  ///< diagnostic when diverged
};

/// Rollout -> advantage estimation -> trust-region update loop with the
/// curriculum factor advancing every iteration. Deterministic per seed.
/// When outputDir is set, writes policy checkpoints (mean net with the log
/// stds as the extra block), the value net, and a JSONL training log.
/// Divergence (non-finite rewards or simulation blow-up) stops the loop and
/// reports the diagnostic instead of throwing.
TrainBehaviorResult trainBehavior(BehaviorId task, const RobotModel& model,
                                  const TrainBehaviorConfig& cfg);

}  // namespace upright
