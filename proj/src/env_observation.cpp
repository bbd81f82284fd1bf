#include "upright/env/observation.hpp"

#include <cmath>
#include <stdexcept>

namespace upright {

namespace {

constexpr int kHistoryFeatures =
    static_cast<int>(kPolicyTaps.size()) * kNumJoints;

std::vector<ObservationBlock> selfRightBlocks() {
  return {{"gravity", 2},
          {"angular_velocity", 1},
          {"joint_positions", kNumJoints},
          {"joint_velocities", kNumJoints},
          {"error_history", kHistoryFeatures},
          {"velocity_history", kHistoryFeatures},
          {"previous_action", kNumJoints}};
}

void prepend(std::vector<ObservationBlock>& blocks,
             std::vector<ObservationBlock> head) {
  head.insert(head.end(), blocks.begin(), blocks.end());
  blocks = std::move(head);
}

void writeHistory(const std::array<JointHistory, kNumJoints>& hist,
                  bool velocity, VecX& out, int offset) {
  int i = offset;
  for (int tap : kPolicyTaps)
    for (int j = 0; j < kNumJoints; ++j)
      out[i++] = velocity ? hist[j].velocityAgo(tap) : hist[j].errorAgo(tap);
}

}  // namespace

int ObservationSpec::dim() const {
  int n = 0;
  for (const auto& b : blocks) n += b.size;
  return n;
}

int ObservationSpec::offsetOf(const std::string& name) const {
  int n = 0;
  for (const auto& b : blocks) {
    if (b.name == name) return n;
    n += b.size;
  }
  throw std::invalid_argument("ObservationSpec: no block named " + name);
}

bool ObservationSpec::has(const std::string& name) const {
  for (const auto& b : blocks)
    if (b.name == name) return true;
  return false;
}

ObservationSpec observationSpec(BehaviorId behavior) {
  ObservationSpec spec;
  spec.blocks = selfRightBlocks();
  if (behavior == BehaviorId::SelfRight) return spec;
  prepend(spec.blocks, {{"base_velocity", 2}});
  if (behavior == BehaviorId::StandUp) return spec;
  prepend(spec.blocks, {{"command", 1}, {"height", 1}});
  if (behavior == BehaviorId::Locomotion) return spec;
  prepend(spec.blocks, {{"previous_behavior", 3}});
  return spec;
}

ObservationSpec heightEstimatorSpec() {
  ObservationSpec spec;
  spec.blocks = {{"gravity", 2},
                 {"joint_positions", kNumJoints},
                 {"joint_velocities", kNumJoints},
                 {"error_history", kHistoryFeatures},
                 {"velocity_history", kHistoryFeatures}};
  return spec;
}

Vec2 rotateToBase(double pitch, const Vec2& world) {
  double c = std::cos(pitch), s = std::sin(pitch);
  return Vec2(c * world.x() + s * world.y(), -s * world.x() + c * world.y());
}

VecX buildObservation(BehaviorId behavior, const ObservationInputs& in) {
  if (in.histories == nullptr)
    throw std::invalid_argument("buildObservation: histories missing");
  if (in.jointPos.size() != kNumJoints || in.jointVel.size() != kNumJoints ||
      in.prevAction.size() != kNumJoints)
    throw std::invalid_argument("buildObservation: input dimension mismatch");

  ObservationSpec spec = observationSpec(behavior);
  VecX obs = VecX::Zero(spec.dim());
  int i = 0;
  for (const auto& block : spec.blocks) {
    if (block.name == "previous_behavior") {
      if (in.prevBehavior > 2)
        throw std::invalid_argument("buildObservation: bad previous behavior");
      if (in.prevBehavior >= 0) obs[i + in.prevBehavior] = 1.0;
    } else if (block.name == "command") {
      obs[i] = in.command;
    } else if (block.name == "height") {
      obs[i] = in.height;
    } else if (block.name == "base_velocity") {
      obs.segment<2>(i) = in.baseVelBody;
    } else if (block.name == "gravity") {
      obs.segment<2>(i) = in.gravityBody;
    } else if (block.name == "angular_velocity") {
      obs[i] = in.pitchRate;
    } else if (block.name == "joint_positions") {
      obs.segment(i, kNumJoints) = in.jointPos;
    } else if (block.name == "joint_velocities") {
      obs.segment(i, kNumJoints) = in.jointVel;
    } else if (block.name == "error_history") {
      writeHistory(*in.histories, false, obs, i);
    } else if (block.name == "velocity_history") {
      writeHistory(*in.histories, true, obs, i);
    } else if (block.name == "previous_action") {
      obs.segment(i, kNumJoints) = in.prevAction;
    }
    i += block.size;
  }
  return obs;
}

VecX buildHeightObservation(const ObservationInputs& in) {
  if (in.histories == nullptr)
    throw std::invalid_argument("buildHeightObservation: histories missing");

  VecX obs(kHeightObsDim);
  int i = 0;
  obs.segment<2>(i) = in.gravityBody;
  i += 2;
  obs.segment(i, kNumJoints) = in.jointPos;
  i += kNumJoints;
  obs.segment(i, kNumJoints) = in.jointVel;
  i += kNumJoints;
  writeHistory(*in.histories, false, obs, i);
  i += kHistoryFeatures;
  writeHistory(*in.histories, true, obs, i);
  return obs;
}

}  // namespace upright
