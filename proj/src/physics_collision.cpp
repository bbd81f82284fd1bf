#include "upright/physics/collision.hpp"

#include "upright/physics/geometry.hpp"

namespace upright {

namespace {

struct Capsule {
  Vec2 a, b;       ///< core segment in world coordinates
  double rA, rB;   ///< end radii (foot circle can differ from the shaft)
};

Capsule linkCapsule(const RobotModel& model, const Kinematics& kin, int body) {
  const LinkFrame& f = kin.frames[body];
  const LinkParams& p = model.link(body);
  Capsule c;
  c.a = f.origin;
  c.b = f.origin + p.length * linkDir(f.angle);
  c.rA = p.radius;
  c.rB = RobotModel::isShank(body) ? model.footRadius : p.radius;
  return c;
}

void addGroundPoint(std::vector<ContactCandidate>& out, int body,
                    const Vec2& center, double radius, ContactKind kind) {
  ContactCandidate c;
  c.body = body;
  c.bodyOther = -1;
  c.point = center - Vec2(0.0, radius);
  c.normal = Vec2(0.0, 1.0);
  c.gap = center.y() - radius;
  c.kind = kind;
  out.push_back(c);
}

}  // namespace

std::vector<ContactCandidate> groundCandidates(const RobotModel& model,
                                               const Kinematics& kin) {
  std::vector<ContactCandidate> out;
  out.reserve(12);

  const LinkFrame& base = kin.frames[kBase];
  const Eigen::Matrix2d R = rot(base.angle);
  const Vec2 h = model.baseHalfExtents;
  const Vec2 corners[4] = {Vec2(-h.x(), -h.y()), Vec2(h.x(), -h.y()),
                           Vec2(h.x(), h.y()), Vec2(-h.x(), h.y())};
  for (const Vec2& corner : corners) {
    ContactCandidate c;
    c.body = kBase;
    c.bodyOther = -1;
    c.point = base.origin + R * corner;
    c.normal = Vec2(0.0, 1.0);
    c.gap = c.point.y();
    c.kind = ContactKind::Body;
    out.push_back(c);
  }

  for (int body = kThighF; body < kNumBodies; ++body) {
    const Capsule cap = linkCapsule(model, kin, body);
    addGroundPoint(out, body, cap.a, cap.rA, ContactKind::Body);
    addGroundPoint(out, body, cap.b, cap.rB,
                   RobotModel::isShank(body) ? ContactKind::Foot
                                             : ContactKind::Body);
  }
  return out;
}

namespace {

/// Non-adjacent link pairs; hinged neighbours always overlap at their joint.
constexpr std::pair<int, int> kSelfPairs[] = {
    {kShankF, kBase},   {kShankH, kBase},   {kThighF, kThighH},
    {kThighF, kShankH}, {kThighH, kShankF}, {kShankF, kShankH}};

bool pairCandidate(const RobotModel& model, const Kinematics& kin, int bodyA,
                   int bodyB, ContactCandidate& out) {
  const Capsule capA = linkCapsule(model, kin, bodyA);
  ClosestPair cp;
  double otherRadius = 0.0;
  if (bodyB == kBase) {
    const LinkFrame& base = kin.frames[kBase];
    cp = closestSegmentBox(capA.a, capA.b, base.origin, base.angle,
                           model.baseHalfExtents);
  } else {
    const Capsule capB = linkCapsule(model, kin, bodyB);
    cp = closestSegmentSegment(capA.a, capA.b, capB.a, capB.b);
    otherRadius = model.link(bodyB).radius;
  }
  const double radius = model.link(bodyA).radius;

  Vec2 n;
  if (cp.dist > 1e-9) {
    n = (cp.onA - cp.onB) / cp.dist;
  } else if (cp.dist < -1e-9) {
    n = (cp.onB - cp.onA).normalized();  // core inside the box: push to face
  } else {
    n = perp((capA.b - capA.a).normalized());  // cores touch exactly
  }

  out.body = bodyA;
  out.bodyOther = bodyB;
  out.gap = cp.dist - radius - otherRadius;
  out.normal = n;
  out.point = 0.5 * ((cp.onA - radius * n) + (cp.onB + otherRadius * n));
  out.kind = ContactKind::Self;
  return true;
}

}  // namespace

std::vector<ContactCandidate> selfCollisionCandidates(const RobotModel& model,
                                                      const Kinematics& kin) {
  std::vector<ContactCandidate> out;
  out.reserve(6);
  for (const auto& [a, b] : kSelfPairs) {
    ContactCandidate c;
    if (pairCandidate(model, kin, a, b, c)) out.push_back(c);
  }
  return out;
}

std::vector<std::pair<int, int>> detectSelfCollisions(const RobotModel& model,
                                                      const VecX& q) {
  const Kinematics kin = forwardKinematics(model, q);
  std::vector<std::pair<int, int>> out;
  for (const ContactCandidate& c : selfCollisionCandidates(model, kin)) {
    if (c.gap < 0.0) out.emplace_back(c.body, c.bodyOther);
  }
  return out;
}

}  // namespace upright
