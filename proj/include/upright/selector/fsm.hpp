#pragma once

#include "upright/common/behavior.hpp"
#include "upright/physics/types.hpp"

namespace upright {

/// Thresholds of the handcrafted transition rules. The published transition
/// graph survives only as prose, so this reconstruction pins the stated
/// pieces: an uprightness test on the gravity direction, a standing height
/// band, and the half-second settling wait after self-righting.
struct FsmConfig {
  double uprightCo = 0.3;          ///< upright when the gravity distance is below
  double uprightHysteresis = 0.05; ///< extra margin before upright is revoked
  double standHeightLow = 0.45;    ///< standing band, entry thresholds
  double standHeightHigh = 0.6;
  double heightHysteresis = 0.02;  ///< extra margin before leaving locomotion
  double selfRightWait = 0.5;      ///< upright seconds before standing up

  void validate() const;  ///< throws std::invalid_argument on bad values
};

/// Estimates available to the rules. The joint positions are part of the
/// interface but no rule reads them; a posture that is upright at a low
/// height always looks ready for standing up, which is exactly the corner
/// the learned selector handles and this baseline does not.
struct FsmInputs {
  Vec2 gravityBody = Vec2(0.0, -1.0);
  double height = 0.0;
  VecX jointPositions = VecX::Zero(kNumJoints);
};

/// Handcrafted behavior arbiter: a current behavior, an uprightness latch
/// with hysteresis, and the self-right settling timer.
class FsmSelector {
 public:
  explicit FsmSelector(FsmConfig cfg = {});

  /// Advances timers by dt and applies the transition rules.
  BehaviorId update(const FsmInputs& in, double dt);

  BehaviorId current() const { return current_; }
  bool upright() const { return upright_; }
  void reset();

 private:
  bool inStandBand(double height) const;

  FsmConfig cfg_;
  BehaviorId current_ = BehaviorId::SelfRight;
  bool upright_ = false;
  double uprightTime_ = 0.0;  ///< continuous upright time while self-righting
};

}  // namespace upright
