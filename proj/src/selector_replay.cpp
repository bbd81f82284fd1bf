#include "upright/selector/replay.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace upright {

ReplayMemory::ReplayMemory(int capacity) : capacity_(capacity) {
  if (capacity < 1)
    throw std::invalid_argument("ReplayMemory: capacity must be positive");
}

void ReplayMemory::append(VecX observation, double height) {
  if (size() < capacity_) {
    observations_.push_back(std::move(observation));
    heights_.push_back(height);
  } else {
    observations_[head_] = std::move(observation);
    heights_[head_] = height;
    head_ = (head_ + 1) % capacity_;
  }
  ++inserted_;
}

ReplayMemory::Batch ReplayMemory::sample(int count, Rng& rng) {
  if (count < 1)
    throw std::invalid_argument("ReplayMemory: count must be positive");
  if (observations_.empty())
    throw std::invalid_argument("ReplayMemory: sampling from empty memory");

  const int n = size();
  const int k = std::min(count, n);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i)
    std::swap(idx[i], idx[i + rng.index(n - i)]);

  Batch batch;
  batch.observations.reserve(k);
  batch.heights.resize(k);
  for (int i = 0; i < k; ++i) {
    batch.observations.push_back(observations_[idx[i]]);
    batch.heights[i] = heights_[idx[i]];
  }
  sampled_ += k;
  return batch;
}

}  // namespace upright
