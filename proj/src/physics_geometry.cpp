#include "upright/physics/geometry.hpp"

#include "upright/physics/kinematics.hpp"

namespace upright {

ClosestPair closestSegmentSegment(const Vec2& p1, const Vec2& q1,
                                  const Vec2& p2, const Vec2& q2) {
  // Ericson-style clamped closest point of approach.
  const Vec2 d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
  const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  double s = 0.0, t = 0.0;
  if (a < 1e-18 && e < 1e-18) {
    // both degenerate
  } else if (a < 1e-18) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e < 1e-18) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      if (denom > 1e-18) s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  ClosestPair out;
  out.onA = p1 + s * d1;
  out.onB = p2 + t * d2;
  out.dist = (out.onA - out.onB).norm();
  return out;
}

namespace {

bool insideBox(const Vec2& p, const Vec2& half) {
  return std::abs(p.x()) <= half.x() && std::abs(p.y()) <= half.y();
}

}  // namespace

ClosestPair closestSegmentBox(const Vec2& p, const Vec2& q, const Vec2& center,
                              double angle, const Vec2& half) {
  const Eigen::Matrix2d R = rot(angle);
  const Vec2 pl = R.transpose() * (p - center);
  const Vec2 ql = R.transpose() * (q - center);

  const bool pIn = insideBox(pl, half);
  const bool qIn = insideBox(ql, half);
  ClosestPair best;
  if (pIn || qIn) {
    // core inside the box: report depth below the nearest face of the deeper
    // endpoint and push out along that face normal
    const Vec2 inner = pIn ? pl : ql;
    double bestDepth = std::numeric_limits<double>::max();
    Vec2 n(1, 0);
    const double dxp = half.x() - inner.x(), dxm = inner.x() + half.x();
    const double dyp = half.y() - inner.y(), dym = inner.y() + half.y();
    if (dxp < bestDepth) { bestDepth = dxp; n = Vec2(1, 0); }
    if (dxm < bestDepth) { bestDepth = dxm; n = Vec2(-1, 0); }
    if (dyp < bestDepth) { bestDepth = dyp; n = Vec2(0, 1); }
    if (dym < bestDepth) { bestDepth = dym; n = Vec2(0, -1); }
    best.onA = R * inner + center;
    best.onB = R * (inner + bestDepth * n) + center;
    best.dist = -bestDepth;
    return best;
  }

  const Vec2 corners[4] = {Vec2(-half.x(), -half.y()), Vec2(half.x(), -half.y()),
                           Vec2(half.x(), half.y()), Vec2(-half.x(), half.y())};
  best.dist = std::numeric_limits<double>::max();
  for (int i = 0; i < 4; ++i) {
    ClosestPair c =
        closestSegmentSegment(pl, ql, corners[i], corners[(i + 1) % 4]);
    if (c.dist < best.dist) best = c;
  }
  best.onA = R * best.onA + center;
  best.onB = R * best.onB + center;
  return best;
}

}  // namespace upright
