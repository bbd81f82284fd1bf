#pragma once

#include <algorithm>
#include <cmath>

#include "upright/physics/types.hpp"

namespace upright {

struct ClosestPair {
  Vec2 onA = Vec2::Zero();
  Vec2 onB = Vec2::Zero();
  double dist = 0.0;
};

/// Closest points between segments [p1,q1] and [p2,q2].
ClosestPair closestSegmentSegment(const Vec2& p1, const Vec2& q1,
                                  const Vec2& p2, const Vec2& q2);

/// Closest points between a segment and an oriented box (center, angle,
/// half extents). `onA` lies on the segment, `onB` on the box surface. When
/// the segment core enters the box, dist goes negative (depth below the
/// nearest face) and the pair straddles that face.
ClosestPair closestSegmentBox(const Vec2& p, const Vec2& q, const Vec2& center,
                              double angle, const Vec2& half);

inline Vec2 closestPointOnSegment(const Vec2& a, const Vec2& b, const Vec2& p) {
  Vec2 ab = b - a;
  double len2 = ab.squaredNorm();
  if (len2 < 1e-18) return a;
  double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

}  // namespace upright
