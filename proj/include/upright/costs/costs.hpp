#pragma once

#include "upright/common/behavior.hpp"
#include "upright/physics/model.hpp"
#include "upright/physics/types.hpp"

namespace upright {

/// Bounded error kernel, K(e|alpha) = -1/(e^{alpha e} + 2 + e^{-alpha e}).
/// Symmetric in e, range [-0.25, 0); stays strictly negative even when the
/// exponential saturates. Throws std::invalid_argument for alpha <= 0.
double logisticKernel(double e, double alpha);

/// Minimum angle between two angular positions over all 2*pi wraps, in [0, pi].
double angleDiff(double a, double b);

/// One scalar per cost table row.
struct CostTermValues {
  double cOmega = 0.0;  ///< angular velocity tracking, kernelized
  double cV = 0.0;      ///< linear velocity tracking, kernelized
  double cH = 0.0;      ///< 1 when base height < 0.35 m
  double cJp = 0.0;     ///< summed minimum angle to the joint targets
  double cO = 0.0;      ///< distance of the gravity direction from upright
  double cTau = 0.0;    ///< squared torque norm
  double cPw = 0.0;     ///< positive mechanical joint power
  double cA = 0.0;      ///< squared joint accelerations
  double cJs = 0.0;     ///< joint speed limit violation
  double cBi = 0.0;     ///< mean non-foot contact impulse norm
  double cBs = 0.0;     ///< mean squared contact point speed
  double cFs = 0.0;     ///< slip speed of grounded feet
  double cFc = 0.0;     ///< swing foot clearance error around 0.07 m
  double cCin = 0.0;    ///< number of self-collision points
  double cAd = 0.0;     ///< squared action difference
};

struct CostWeights {
  double kOmega = 0.0;
  double kV = 0.0;
  double kO = 0.0;
  double kH = 0.0;
  double kJp = 0.0;
  double kA = 0.0;
  double kBi = 0.0;
  double kBs = 0.0;
  double kCin = 0.0;
  double kAd = 0.0;
  double kJslim = 0.0;
  double kTau = 0.0;
  double kPw = 0.0;
  double kFc = 0.0;
  double kFs = 0.0;
  double alphaA = 1.0;  ///< kernel sensitivity for angular velocity
  double alphaL = 1.0;  ///< kernel sensitivity for linear velocity

  /// The cost table prints the joint speed penalty in terms of joint
  /// positions, which rewards exceeding the limit; the default uses the
  /// velocity-limit reading, this switch restores the printed form.
  bool jointSpeedLiteralForm = false;

  void validate() const;  ///< throws std::invalid_argument on bad values
};

struct CostTargets {
  double omega = 0.0;               ///< pitch rate target
  Vec2 v = Vec2::Zero();            ///< base linear velocity target
  VecX joints = VecX::Zero(kNumJoints);
};

CostTermValues evalCostTerms(const RobotModel& model, const SimState& state,
                             const ContactReport& report, const VecX& tau,
                             const VecX& jointAccels, const VecX& prevAction,
                             const VecX& action, const CostTargets& targets,
                             const CostWeights& weights);

/// Training progress multiplier applied to the regularization terms.
struct CurriculumState {
  double kC = 0.3;
  int iteration = 0;
};

/// k_c(i) = 0.3^(0.997^i): starts at 0.3 and rises monotonically toward 1.
CurriculumState advanceCurriculum(const CurriculumState& cur);

/// Per-behavior linear combination of the cost terms. The regularization
/// terms (torque, acceleration, joint speed, action difference, power) are
/// scaled by the curriculum multiplier; task terms are not. RL reward is the
/// negative of this.
double compositeCost(BehaviorId behavior, const CostTermValues& terms,
                     const CostWeights& weights, double kC);

}  // namespace upright
