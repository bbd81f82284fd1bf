#pragma once

#include <utility>
#include <vector>

#include "upright/nets/mlp.hpp"
#include "upright/physics/types.hpp"

namespace upright {

/// On-policy rollout storage shared by the behavior and selector trainers.
/// Steps of one episode sit contiguously and an episode id never reappears
/// after its run ends. Discrete tasks store the class index as a one-element
/// action vector.
struct TrajectoryBatch {
  std::vector<VecX> observations;
  std::vector<VecX> actions;
  std::vector<double> logProbs;  ///< log pi(a_t | s_t) under the collecting policy
  std::vector<double> rewards;
  std::vector<double> values;    ///< V(s_t); leave empty to have the update fill it
  std::vector<uint8_t> dones;    ///< true terminal, cuts the bootstrap
  std::vector<int> episodeIds;

  /// Observation reached after the last step of each episode, in order of
  /// first appearance; carries the bootstrap for truncated episodes.
  std::vector<VecX> finalObservations;
  /// Bootstrap value per episode, ignored where the last step is a terminal.
  std::vector<double> finalValues;

  double gamma = 0.99;
  double lambda = 0.95;

  int size() const { return static_cast<int>(observations.size()); }

  void addStep(int episodeId, VecX obs, VecX action, double logProb,
               double reward, bool done);
  /// Records the post-rollout observation of the episode just ended. Call
  /// once per episode, after its last addStep.
  void finishEpisode(VecX finalObs);

  /// Throws std::invalid_argument on length mismatches, non-contiguous
  /// episodes, a terminal flag before an episode end, or gamma, lambda
  /// outside [0, 1].
  void validate() const;
};

/// Half-open [begin, end) step ranges of the episodes, in batch order.
/// Throws if episodes are not contiguous.
std::vector<std::pair<int, int>> episodeSpans(const TrajectoryBatch& batch);

/// Fills values and finalValues from a scalar-output network. Requires one
/// finalObservations entry per episode.
void fillValues(TrajectoryBatch& batch, const Mlp& valueFn);

/// Advantage estimates for one batch. advantages are normalized to zero mean
/// and unit variance over the batch; valueTargets keep the raw scale, the
/// target at step t equals the unnormalized advantage plus the recorded
/// value estimate.
struct GaeResult {
  VecX advantages;
  VecX valueTargets;
};

/// Generalized advantage estimation over the batch:
///   delta_t = r_t + gamma V(s_{t+1}) - V(s_t)
///   A_t     = sum_l (gamma lambda)^l delta_{t+l}
/// with the bootstrap value suppressed after a terminal step. Requires
/// values for every step and a bootstrap value for every episode.
GaeResult computeGae(const TrajectoryBatch& batch);

}  // namespace upright
