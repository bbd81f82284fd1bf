#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "upright/actuator/sea.hpp"
#include "upright/nets/mlp.hpp"

namespace upright {

/// Supervised corpus for the drive network: one row of features per sample,
/// labeled with the analytic drive torque.
struct ActuatorDataset {
  MatX features;  ///< n x kActuatorFeatureDim
  VecX torques;   ///< n
};

/// Excites a single drive-plus-inertia joint with chirp and step position
/// targets and records (features, torque) pairs. Byte-identical per seed.
ActuatorDataset generateActuatorDataset(const SeaParams& params, int samples,
                                        uint64_t seed);

/// Dumps the dataset as CSV with a header row, full double precision.
void writeActuatorDatasetCsv(const ActuatorDataset& dataset,
                             const std::string& path);

struct ActuatorTrainConfig {
  int epochs = 120;
  int batchSize = 256;
  double learningRate = 2e-3;
  double testFraction = 0.2;
};

struct ActuatorTrainResult {
  Mlp net;
  double trainRms = 0.0;  ///< [N m] against the analytic drive
  double testRms = 0.0;   ///< [N m] on the held-out split
  std::vector<double> epochLoss;  ///< normalized-scale training loss
};

/// Fits the two-layer 32-unit softsign drive network to the dataset with a
/// held-out split. Feature standardization and the torque output scale are
/// folded into the first and last layers afterwards, so the returned net
/// consumes raw features and emits newton meters directly.
ActuatorTrainResult trainActuatorNet(const ActuatorDataset& dataset,
                                     const SeaParams& params, uint64_t seed,
                                     const ActuatorTrainConfig& cfg = {});

/// Deployment path: forward pass clamped to the torque limit. Throws on a
/// feature dimension mismatch.
double actuatorNetTorque(const Mlp& net, const VecX& features,
                         double torqueLimit);

}  // namespace upright
