/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "trilimb/scripted_operator.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace trilimb {

namespace {

using Vec3q = Eigen::Vector3d;

/// Damped Newton on a 3x3 system with a central-difference Jacobian.
template <class F, class Clamp>
Vec3q solve3(F&& residual, Vec3q q, Clamp&& clamp, double max_step) {
  constexpr double h = 1e-5;
  for (int it = 0; it < 200; ++it) {
    const Vec3 r = residual(q);
    if (r.norm() < 1e-10) break;
    Eigen::Matrix3d J;
    for (int k = 0; k < 3; ++k) {
      Vec3q qp = q, qm = q;
      qp[k] += h;
      qm[k] -= h;
      J.col(k) = (residual(qp) - residual(qm)) / (2.0 * h);
    }
    Vec3q dq = J.colPivHouseholderQr().solve(-r);
    if (!dq.allFinite()) break;
    const double big = dq.cwiseAbs().maxCoeff();
    if (big > max_step) dq *= max_step / big;
    q = clamp(q + dq);
  }
  return q;
}

double quantize(double x) { return std::round(x * 1e4) / 1e4; }

double servo_rate(double err, double gain, double lo, double hi, double tol) {
  if (std::abs(err) <= tol) return 0.0;
  return std::copysign(std::clamp(gain * std::abs(err), lo, hi), err);
}

/// Axis deflection that yields `rate` after the dead-band rescale.
double deflection_for(double rate, double max_rate, double eps) {
  if (rate == 0.0) return 0.0;
  const double frac = std::min(std::abs(rate) / max_rate, 1.0);
  return quantize(std::copysign(eps + (1.0 - eps) * frac, rate));
}

}  // namespace

std::optional<EndoscopeState> aim_endoscope(const EndoscopeState& from, const Vec3& point,
                                            double standoff_mm, double bend_len_mm) {
  EndoscopeState s = from;
  auto residual = [&](const Vec3q& q) {
    EndoscopeState t = s;
    t.theta_e_deg = q[0];
    t.phi_e_deg = q[1];
    t.y_e_mm = q[2];
    const TipPose p = endoscope_fk(t, bend_len_mm);
    return Vec3(p.position + standoff_mm * p.axis() - point);
  };
  auto clamp = [](Vec3q q) {
    q[0] = std::clamp(q[0], -170.0, 170.0);
    q[1] = std::clamp(q[1], -170.0, 170.0);
    q[2] = std::clamp(q[2], 0.0, 500.0);
    return q;
  };
  const Vec3q q = solve3(residual, Vec3q(from.theta_e_deg, from.phi_e_deg, from.y_e_mm), clamp,
                         20.0);
  if (residual(q).norm() > 1e-6) return std::nullopt;
  s.theta_e_deg = q[0];
  s.phi_e_deg = q[1];
  s.y_e_mm = q[2];
  return s;
}

std::optional<InstrumentArmState> reach_tool(const InstrumentArmState& arm, const TipPose& base,
                                             const Vec3& point, const InstrumentGeometry& geom) {
  InstrumentArmState a = arm;
  auto residual = [&](const Vec3q& q) {
    InstrumentArmState t = a;
    t.bend1_deg = q[0];
    t.bend2_deg = q[1];
    t.trans_mm = q[2];
    return Vec3(instrument_fk(t, base, geom).position - point);
  };
  auto clamp = [](Vec3q q) {
    q[0] = std::clamp(q[0], -kToolBendLimitDeg, kToolBendLimitDeg);
    q[1] = std::clamp(q[1], -kToolBendLimitDeg, kToolBendLimitDeg);
    q[2] = std::clamp(q[2], -kToolWithdrawMm, 0.0);
    return q;
  };
  const Vec3q q = solve3(residual, Vec3q(0.0, 0.0, -15.0), clamp, 10.0);
  if (residual(q).norm() > 0.05) return std::nullopt;
  a.bend1_deg = q[0];
  a.bend2_deg = q[1];
  a.trans_mm = q[2];
  return a;
}

ScriptedOperator::ScriptedOperator(ScriptOptions opt) : opt_(opt) {}

void ScriptedOperator::plan(const Session& s) {
  const bool clutch = s.config().mode == ControlMode::HandClutch;
  const Scene& scene = s.world().scene;
  steps_.push_back({.kind = Kind::Idle, .ticks = opt_.idle_ticks});

  for (std::size_t i = 0; i < kTargetCount; ++i) {
    steps_.push_back({.kind = Kind::AimScope, .target = i});
    if (clutch) steps_.push_back({.kind = Kind::Press, .upper = false});

    if (scene.targets[i].kind == TargetKind::Covered) {
      steps_.push_back({.kind = Kind::Reach, .hand = Hand::Left, .target = i});
      steps_.push_back({.kind = Kind::Grip, .hand = Hand::Left, .value = 1.0});
      steps_.push_back({.kind = Kind::Reach,
                        .hand = Hand::Left,
                        .target = i,
                        .offset = Vec3(0.0, 0.0, opt_.lift_mm)});
      steps_.push_back({.kind = Kind::Grip, .hand = Hand::Left, .value = 0.0});
      steps_.push_back({.kind = Kind::Rest, .hand = Hand::Left});
    }

    if (i == 0 && opt_.miss_touches > 0) {
      // First in-plane offset that is outside every zone.
      Vec3 miss(0.0, -12.0, 0.0);
      for (const Vec3& cand : {Vec3(0, -12, 0), Vec3(0, 12, 0), Vec3(-12, 0, 0), Vec3(12, 0, 0)}) {
        const auto c = scene.plane.plane_coords(scene.targets[0].center);
        const Vec3 p = scene.plane.at(c.x() + cand.x(), c.y() + cand.y());
        bool inside = false;
        for (std::size_t k = 0; k < kTargetCount; ++k) inside |= in_target_zone(scene, k, p);
        if (!inside) {
          miss = cand;
          break;
        }
      }
      steps_.push_back({.kind = Kind::Reach, .hand = Hand::Right, .target = i, .offset = miss});
      for (std::uint32_t k = 0; k < opt_.miss_touches; ++k) {
        steps_.push_back({.kind = Kind::Cautery, .value = 1.0, .ticks = 3});
        steps_.push_back({.kind = Kind::Cautery, .value = 0.0, .ticks = 3});
      }
    }

    steps_.push_back({.kind = Kind::Reach, .hand = Hand::Right, .target = i});
    steps_.push_back({.kind = Kind::Cautery, .value = 1.0, .ticks = 3});
    steps_.push_back({.kind = Kind::Cautery, .value = 0.0, .ticks = 2});
    steps_.push_back({.kind = Kind::Rest, .hand = Hand::Right});
    if (clutch && i + 1 < kTargetCount) steps_.push_back({.kind = Kind::Press, .upper = true});
  }
  steps_.push_back({.kind = Kind::Tail, .ticks = opt_.tail_ticks});
}

void ScriptedOperator::emit_hands(AxesRecord& out) const {
  using A = AxesRecord;
  const auto& l = hand_[0];
  const auto& r = hand_[1];
  out[A::kLx] = l[0];
  out[A::kLy] = l[1];
  out[A::kLz] = l[2];
  out[A::kLGrip] = l[3];
  out[A::kRx] = r[0];
  out[A::kRy] = r[1];
  out[A::kRz] = r[2];
  out[A::kRGrip] = r[3];
}

bool ScriptedOperator::run_step(const Session& s, Step& step, AxesRecord& out) {
  using A = AxesRecord;
  const SessionConfig& cfg = s.config();
  const Scene& scene = s.world().scene;
  const bool clutch = cfg.mode == ControlMode::HandClutch;
  if (step_age_ > opt_.step_timeout_ticks) return true;

  auto hand_converged = [&](Hand h) {
    const auto& ax = hand_[static_cast<std::size_t>(h)];
    const InstrumentArmState& arm = s.arm(h);
    const double b1 = ax[1] * kToolBendLimitDeg;
    const double b2 = ax[2] * kToolBendLimitDeg;
    const double tr = std::clamp(ax[0] * kToolWithdrawMm, -kToolWithdrawMm, 0.0);
    return std::abs(arm.bend1_deg - b1) < 1e-6 && std::abs(arm.bend2_deg - b2) < 1e-6 &&
           std::abs(arm.trans_mm - tr) < 1e-6;
  };

  switch (step.kind) {
    case Kind::Idle:
    case Kind::Tail:
      if (step_age_ >= step.ticks) return true;
      break;

    case Kind::AimScope: {
      if (step_age_ == 0) {
        scope_goal_ = aim_endoscope(s.endoscope(), scene.targets[step.target].center,
                                    opt_.standoff_mm, cfg.endoscope.bend_length_mm);
        if (!scope_goal_) return true;
      }
      const EndoscopeState& e = s.endoscope();
      const RateConfig& rc = cfg.rates;
      const double th = servo_rate(scope_goal_->theta_e_deg - e.theta_e_deg, 3.0, 6.0,
                                   rc.max_bend_rate, 0.15);
      const double ph = servo_rate(scope_goal_->phi_e_deg - e.phi_e_deg, 3.0, 6.0,
                                   rc.max_bend_rate, 0.15);
      const double y = servo_rate(scope_goal_->y_e_mm - e.y_e_mm, 2.0, 3.0, rc.max_trans_rate, 0.1);
      if (th == 0.0 && ph == 0.0 && y == 0.0) return true;
      const double dth = deflection_for(th, rc.max_bend_rate, rc.deadband);
      const double dph = deflection_for(ph, rc.max_bend_rate, rc.deadband);
      const double dy = deflection_for(y, rc.max_trans_rate, rc.deadband);
      if (clutch) {
        emit_hands(out);
        out[A::kRx] = dy;
        out[A::kRy] = dph;
        out[A::kRz] = dth;
      } else {
        emit_hands(out);
        out[A::kThetaF] = dth;
        out[A::kPhiF] = dph;
        out[A::kYF] = dy;
      }
      ++step_age_;
      return false;
    }

    case Kind::Press:
      if (step_age_ >= 2) return true;
      emit_hands(out);
      if (step_age_ == 0) out[step.upper ? A::kRBtnUpper : A::kRBtnLower] = 1.0;
      ++step_age_;
      return false;

    case Kind::Reach: {
      auto& ax = hand_[static_cast<std::size_t>(step.hand)];
      if (step_age_ == 0) {
        const Target& t = scene.targets[step.target];
        const auto c = scene.plane.plane_coords(t.center);
        const Vec3 p = scene.plane.at(c.x() + step.offset.x(), c.y() + step.offset.y(),
                                      step.offset.z());
        const auto sol = reach_tool(s.arm(step.hand), s.tool_base(step.hand), p,
                                    cfg.tool_geometry);
        if (!sol) return true;
        ax[0] = quantize(sol->trans_mm / kToolWithdrawMm);
        ax[1] = quantize(sol->bend1_deg / kToolBendLimitDeg);
        ax[2] = quantize(sol->bend2_deg / kToolBendLimitDeg);
      }
      if (hand_converged(step.hand)) return true;
      break;
    }

    case Kind::Rest: {
      auto& ax = hand_[static_cast<std::size_t>(step.hand)];
      ax[0] = ax[1] = ax[2] = 0.0;
      if (hand_converged(step.hand)) return true;
      break;
    }

    case Kind::Grip: {
      auto& ax = hand_[static_cast<std::size_t>(step.hand)];
      ax[3] = step.value;
      if (std::abs(s.arm(step.hand).grip.value_or(0.0) - step.value) < 1e-9) return true;
      break;
    }

    case Kind::Cautery:
      if (step_age_ >= step.ticks) return true;
      emit_hands(out);
      out[A::kCautery] = step.value;
      ++step_age_;
      return false;
  }

  emit_hands(out);
  ++step_age_;
  return false;
}

AxesRecord ScriptedOperator::next(const Session& s) {
  if (!planned_) {
    plan(s);
    planned_ = true;
  }
  AxesRecord out;
  while (!steps_.empty()) {
    if (!run_step(s, steps_.front(), out)) return out;
    steps_.pop_front();
    step_age_ = 0;
    out = AxesRecord{};
  }
  done_ = true;
  return AxesRecord{};
}

TrialLog run_scripted(const SessionConfig& cfg, const ScriptOptions& opt) {
  Recorder rec(cfg);
  ScriptedOperator op(opt);
  while (rec.session().current_tick() < opt.max_ticks) {
    const AxesRecord axes = op.next(rec.session());
    if (op.done()) break;
    rec.step(axes);
  }
  return rec.log();
}

}  // namespace trilimb
