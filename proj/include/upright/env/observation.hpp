#pragma once

#include <array>
#include <string>
#include <vector>

#include "upright/actuator/sea.hpp"
#include "upright/common/behavior.hpp"
#include "upright/physics/types.hpp"

namespace upright {

/// History taps read by the policies and the height estimator: the latest
/// base-rate sample and one 20 ms older.
inline constexpr std::array<int, 2> kPolicyTaps{0, 8};

struct ObservationBlock {
  std::string name;
  int size = 0;
};

/// Ordered feature layout of one observation vector. Each policy's layout
/// extends the next simpler one as a suffix, so the self-righting features
/// occupy the tail of every behavior observation.
struct ObservationSpec {
  std::vector<ObservationBlock> blocks;

  int dim() const;
  /// Offset of a named block; throws std::invalid_argument if absent.
  int offsetOf(const std::string& name) const;
  bool has(const std::string& name) const;
};

ObservationSpec observationSpec(BehaviorId behavior);
ObservationSpec heightEstimatorSpec();

inline constexpr int kSelfRightObsDim = 31;
inline constexpr int kStandUpObsDim = 33;
inline constexpr int kLocomotionObsDim = 35;
inline constexpr int kSelectorObsDim = 38;
inline constexpr int kHeightObsDim = 26;

/// Everything an observation can draw from, in true (noise-free) units.
/// The height channel carries whatever the consumer should see there, either
/// the true base height or an estimate.
struct ObservationInputs {
  Vec2 gravityBody = Vec2(0.0, -1.0);
  double pitchRate = 0.0;
  VecX jointPos = VecX::Zero(kNumJoints);
  VecX jointVel = VecX::Zero(kNumJoints);
  const std::array<JointHistory, kNumJoints>* histories = nullptr;
  VecX prevAction = VecX::Zero(kNumJoints);
  Vec2 baseVelBody = Vec2::Zero();
  double command = 0.0;
  double height = 0.0;
  int prevBehavior = -1;  ///< one-hot source for the selector; -1 = none
};

/// World-to-base rotation of a planar vector.
Vec2 rotateToBase(double pitch, const Vec2& world);

/// Assemble one observation vector per the behavior's layout. Requires
/// histories; throws std::invalid_argument when they are missing or when
/// prevBehavior is out of range for the selector.
VecX buildObservation(BehaviorId behavior, const ObservationInputs& in);

/// Assemble the height-estimator input. Uses only posture, joint signals,
/// and their histories, so it is invariant to base position and velocity.
VecX buildHeightObservation(const ObservationInputs& in);

}  // namespace upright
