#include "upright/physics/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "upright/physics/kinematics.hpp"

namespace upright {

namespace {

double bodyMass(const RobotModel& model, int body) {
  return body == kBase ? model.baseMass : model.link(body).mass;
}

double bodyInertia(const RobotModel& model, int body) {
  return body == kBase ? model.baseInertia : model.link(body).inertia;
}

}  // namespace

PlanarSim::PlanarSim(RobotModel model, SimParams params)
    : model_(std::move(model)), params_(params) {
  model_.validate();
}

MatX PlanarSim::massMatrix(const VecX& q) const {
  const BodyJacobians jac = computeBodyJacobians(model_, q, VecX::Zero(kDof));
  MatX M = MatX::Zero(kDof, kDof);
  for (int b = 0; b < kNumBodies; ++b) {
    M.noalias() += bodyMass(model_, b) * jac.Jv[b].transpose() * jac.Jv[b];
    M.noalias() +=
        bodyInertia(model_, b) * jac.Jw[b].transpose() * jac.Jw[b];
  }
  return M;
}

VecX PlanarSim::nonlinearEffects(const VecX& q, const VecX& u) const {
  const BodyJacobians jac = computeBodyJacobians(model_, q, u);
  const Vec2 g(0.0, -model_.gravity);
  VecX h = VecX::Zero(kDof);
  for (int b = 0; b < kNumBodies; ++b) {
    const double m = bodyMass(model_, b);
    h.noalias() += m * jac.Jv[b].transpose() * (jac.biasAcc[b] - g);
  }
  return h;
}

double PlanarSim::energy(const SimState& state) const {
  const BodyJacobians jac =
      computeBodyJacobians(model_, state.q, state.u);
  double e = 0.0;
  for (int b = 0; b < kNumBodies; ++b) {
    const Vec2 v = jac.Jv[b] * state.u;
    const double w = jac.Jw[b] * state.u;
    e += 0.5 * bodyMass(model_, b) * v.squaredNorm();
    e += 0.5 * bodyInertia(model_, b) * w * w;
    e += bodyMass(model_, b) * model_.gravity * jac.com[b].y();
  }
  return e;
}

VecX PlanarSim::momentum(const SimState& state) const {
  return massMatrix(state.q) * state.u;
}

double PlanarSim::totalMass() const {
  double m = model_.baseMass;
  m += kNumLegs * (model_.thigh.mass + model_.shank.mass);
  return m;
}

ContactReport PlanarSim::step(SimState& state, const VecX& jointTorques) const {
  if (!state.finite()) throw std::runtime_error("simulation state not finite");
  if (jointTorques.size() != kNumJoints)
    throw std::runtime_error("torque dimension mismatch");

  const double dt = params_.dt;
  VecX tau = VecX::Zero(kDof);
  for (int j = 0; j < kNumJoints; ++j) {
    tau[3 + j] =
        std::clamp(jointTorques[j], -model_.torqueLimit, model_.torqueLimit);
  }

  const MatX M = massMatrix(state.q);
  const VecX h = nonlinearEffects(state.q, state.u);
  Eigen::LDLT<MatX> ldlt(M);
  const VecX uFree = state.u + dt * ldlt.solve(tau - h);

  const Kinematics kin = forwardKinematics(model_, state.q);
  const BodyJacobians jac = computeBodyJacobians(model_, state.q, state.u);

  std::vector<ContactCandidate> candidates = groundCandidates(model_, kin);
  {
    std::vector<ContactCandidate> self =
        selfCollisionCandidates(model_, kin);
    candidates.insert(candidates.end(), self.begin(), self.end());
  }

  std::vector<SolverContact> rows;
  std::vector<ContactCandidate> kept;
  rows.reserve(candidates.size());
  kept.reserve(candidates.size());
  for (const ContactCandidate& c : candidates) {
    if (c.gap >= params_.contactMargin) continue;

    SolverContact row;
    row.Jn.setZero();
    row.Jt.setZero();
    Eigen::Matrix<double, 2, kDof> Jp = pointJacobian(jac, c.body, c.point);
    if (c.bodyOther >= 0)
      Jp -= pointJacobian(jac, c.bodyOther, c.point);
    const Vec2 t = perp(c.normal);
    row.Jn = c.normal.transpose() * Jp;
    row.Jt = t.transpose() * Jp;
    row.mu = model_.friction;

    if (c.gap >= 0.0) {
      // Allow at most the approach that lands on the surface this step,
      // accounting for the midpoint position update; never demand separation.
      const double vnOld = row.Jn * state.u;
      row.vMin = std::min(0.0, -2.0 * c.gap / dt - vnOld);
    } else {
      const double pen = -c.gap;
      row.vMin = std::min(params_.baumgarte * std::max(pen - params_.slop, 0.0) / dt,
                          params_.maxCorrectionVelocity);
    }
    rows.push_back(row);
    kept.push_back(c);
  }

  const PgsResult solved = solveContacts(M, uFree, rows, params_.pgs);

  state.q += dt * 0.5 * (state.u + solved.u);
  state.u = solved.u;
  state.time += dt;
  if (!state.finite()) throw std::runtime_error("simulation state not finite");

  ContactReport report;
  report.solverConverged = solved.converged;
  for (size_t i = 0; i < rows.size(); ++i) {
    const ContactCandidate& c = kept[i];
    const SolverContact& row = rows[i];
    const bool active = row.lambdaN > 1e-12 || c.gap < 0.0;
    if (!active) continue;

    ContactPoint p;
    p.body = c.body;
    p.bodyOther = c.bodyOther;
    p.point = c.point;
    p.normal = c.normal;
    p.gap = c.gap;
    p.impulseNormal = row.lambdaN;
    p.impulseTangent = row.lambdaT;
    p.pointVelocity = pointVelocity(jac, c.body, c.point, state.u);
    p.kind = c.kind;

    const int idx = static_cast<int>(report.contacts.size());
    report.contacts.push_back(p);
    if (c.bodyOther < 0) {
      report.external.push_back(idx);
      if (c.kind == ContactKind::Foot) report.feet.push_back(idx);
    } else {
      report.internal.push_back(idx);
    }
  }

  const Kinematics kinNew = forwardKinematics(model_, state.q);
  const BodyJacobians jacNew = computeBodyJacobians(model_, state.q, state.u);
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const int shank = (leg == 0) ? kShankF : kShankH;
    report.footPos[leg] = kinNew.foot[leg];
    report.footVel[leg] =
        pointVelocity(jacNew, shank, kinNew.foot[leg], state.u);
    report.footGap[leg] = kinNew.foot[leg].y() - model_.footRadius;
  }
  return report;
}

}  // namespace upright
