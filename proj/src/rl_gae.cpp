#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "upright/rl/trajectory.hpp"

namespace upright {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void TrajectoryBatch::addStep(int episodeId, VecX obs, VecX action,
                              double logProb, double reward, bool done) {
  observations.push_back(std::move(obs));
  actions.push_back(std::move(action));
  logProbs.push_back(logProb);
  rewards.push_back(reward);
  dones.push_back(done ? 1 : 0);
  episodeIds.push_back(episodeId);
}

void TrajectoryBatch::finishEpisode(VecX finalObs) {
  finalObservations.push_back(std::move(finalObs));
}

void TrajectoryBatch::validate() const {
  const size_t n = observations.size();
  require(actions.size() == n && logProbs.size() == n && rewards.size() == n &&
              dones.size() == n && episodeIds.size() == n,
          "trajectory arrays disagree in length");
  require(values.empty() || values.size() == n,
          "value estimates disagree in length");
  require(gamma >= 0.0 && gamma <= 1.0 && lambda >= 0.0 && lambda <= 1.0,
          "gamma and lambda must lie in [0, 1]");
  const auto spans = episodeSpans(*this);
  for (const auto& [begin, end] : spans) {
    for (int t = begin; t < end - 1; ++t) {
      require(!dones[t], "terminal flag before the end of an episode");
    }
  }
  require(finalObservations.empty() || finalObservations.size() == spans.size(),
          "one final observation per episode expected");
  require(finalValues.empty() || finalValues.size() == spans.size(),
          "one bootstrap value per episode expected");
}

std::vector<std::pair<int, int>> episodeSpans(const TrajectoryBatch& batch) {
  std::vector<std::pair<int, int>> spans;
  std::unordered_set<int> closed;
  const int n = batch.size();
  int begin = 0;
  for (int t = 1; t <= n; ++t) {
    if (t == n || batch.episodeIds[t] != batch.episodeIds[begin]) {
      const int id = batch.episodeIds[begin];
      require(closed.insert(id).second, "episode steps are not contiguous");
      spans.emplace_back(begin, t);
      begin = t;
    }
  }
  return spans;
}

void fillValues(TrajectoryBatch& batch, const Mlp& valueFn) {
  batch.validate();
  require(valueFn.outputSize() == 1, "value network must have one output");
  const auto spans = episodeSpans(batch);
  require(batch.finalObservations.size() == spans.size(),
          "bootstrap requires a final observation per episode");
  batch.values.resize(batch.size());
  for (int t = 0; t < batch.size(); ++t) {
    batch.values[t] = valueFn.forward(batch.observations[t])(0);
  }
  batch.finalValues.resize(spans.size());
  for (size_t e = 0; e < spans.size(); ++e) {
    batch.finalValues[e] = valueFn.forward(batch.finalObservations[e])(0);
  }
}

GaeResult computeGae(const TrajectoryBatch& batch) {
  batch.validate();
  const int n = batch.size();
  require(n > 0, "empty trajectory batch");
  require(static_cast<int>(batch.values.size()) == n,
          "value estimates missing");
  const auto spans = episodeSpans(batch);
  require(batch.finalValues.size() == spans.size(),
          "bootstrap values missing");

  VecX raw(n);
  for (size_t e = 0; e < spans.size(); ++e) {
    const auto [begin, end] = spans[e];
    double carry = 0.0;
    double nextValue = batch.finalValues[e];
    for (int t = end - 1; t >= begin; --t) {
      const double notDone = batch.dones[t] ? 0.0 : 1.0;
      const double delta =
          batch.rewards[t] + batch.gamma * notDone * nextValue - batch.values[t];
      carry = delta + batch.gamma * batch.lambda * notDone * carry;
      raw(t) = carry;
      nextValue = batch.values[t];
    }
  }

  GaeResult out;
  out.valueTargets =
      raw + Eigen::Map<const VecX>(batch.values.data(), n);
  const double mean = raw.mean();
  const VecX centered = raw.array() - mean;
  const double sigma = std::sqrt(centered.squaredNorm() / n);
  out.advantages = sigma > 1e-12 ? VecX(centered / sigma) : centered;
  return out;
}

}  // namespace upright
