#pragma once

#include <cstdint>
#include <vector>

#include "upright/common/rng.hpp"
#include "upright/physics/types.hpp"

namespace upright {

/// FIFO store of height-estimator inputs paired with the true base height.
/// Rollouts append and the regression step samples; the phases never
/// interleave, so single-owner access is the whole concurrency contract.
class ReplayMemory {
 public:
  explicit ReplayMemory(int capacity);

  /// Evicts the oldest pair once the capacity is reached.
  void append(VecX observation, double height);

  struct Batch {
    std::vector<VecX> observations;
    VecX heights;
  };

  /// Uniform without replacement within one batch; returns min(count, size())
  /// pairs. Throws std::invalid_argument for count < 1 or an empty memory.
  Batch sample(int count, Rng& rng);

  int size() const { return static_cast<int>(observations_.size()); }
  int capacity() const { return capacity_; }
  int64_t inserted() const { return inserted_; }  ///< lifetime appends
  int64_t sampled() const { return sampled_; }    ///< lifetime pairs handed out

 private:
  int capacity_;
  std::vector<VecX> observations_;
  std::vector<double> heights_;
  int head_ = 0;  ///< next eviction slot once full
  int64_t inserted_ = 0;
  int64_t sampled_ = 0;
};

}  // namespace upright
