#pragma once

namespace upright {

/// The three recovery behaviors plus the selector that arbitrates them.
enum class BehaviorId { SelfRight = 0, StandUp = 1, Locomotion = 2, Selector = 3 };

inline const char* behaviorName(BehaviorId id) {
  switch (id) {
    case BehaviorId::SelfRight: return "selfright";
    case BehaviorId::StandUp: return "standup";
    case BehaviorId::Locomotion: return "locomotion";
    case BehaviorId::Selector: return "selector";
  }
  return "unknown";
}

}  // namespace upright
