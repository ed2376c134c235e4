// Inverse kinematics of the three stages and per-point reachability.
//
// Translational stage (TLS), per leg u:
//     u = -p_u sin(rho_u) - f_u - r
// Transmitting stage (TMS), four-bar closure in the (v, w) plane of leg u:
//     c_u^2 = (V - d_u sin delta_u)^2 + (W + d_u cos delta_u)^2
//     V = v + t_u sin sigma_u,   W = (w + o_u) - t_u cos sigma_u - p_u cos rho_u
//   v, w are the drill-tip coordinates along the leg's v and w axes; the
//   transmitting-link pivot sits o_u further along w. Offsets f_u and r act
//   along u only and therefore leave this plane untouched.
// Rotational stage (RTS), spherical five-bar, per leg u in {x, y}:
//     u_beta(sigma_u) . e = cos(beta_u)
//     u_beta(sigma) = cos(alpha) u + sin(alpha) (cos(sigma) w - sin(sigma) v)
//   i.e. u_alpha = u and, at sigma = 0, u_beta lies in the (u, w) plane.
//
// Both closures reduce to A sin q + B cos q = C, solved in closed form with
// a +/- branch flag.
#ifndef ARCUBE_KINEMATICS_HPP
#define ARCUBE_KINEMATICS_HPP

#include "arcube/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace arcube {

// Solvability margin on |C| <= sqrt(A^2 + B^2), relative.
inline constexpr double kSolvabilityMargin = 1e-12;
// Residual acceptance for an IK solution.
inline constexpr double kResidualTolerance = 1e-9;

// ---------------------------------------------------------------------------
// Scalar trigonometric closure
// ---------------------------------------------------------------------------

template <typename Scalar>
struct TrigClosure {
  Scalar a = Scalar(0);
  Scalar b = Scalar(0);
  Scalar c = Scalar(0);

  template <typename Angle>
  Angle residual(Angle q) const {
    using std::cos;
    using std::sin;
    return Angle(a) * sin(q) + Angle(b) * cos(q) - Angle(c);
  }
};

enum class TrigStatus { Solved, Degenerate, Unreachable };

template <typename Scalar>
struct TrigSolution {
  TrigStatus status = TrigStatus::Unreachable;
  Scalar angle = Scalar(0);

  bool ok() const { return status != TrigStatus::Unreachable; }
};

/// q = atan2(A, B) + branch * acos(C / sqrt(A^2 + B^2)), normalized to (-pi, pi].
/// When A = B = C = 0 every angle solves the closure; that case is reported
/// as Degenerate with q = 0.
template <typename Scalar>
TrigSolution<Scalar> solve_trig(const TrigClosure<Scalar>& closure, int branch) {
  using std::abs;
  using std::acos;
  using std::atan2;
  using std::hypot;
  const Scalar radius = hypot(closure.a, closure.b);
  const Scalar magnitude = Scalar(1) + abs(closure.a) + abs(closure.b) + abs(closure.c);
  const Scalar tiny = Scalar(1e-14) * magnitude;

  if (radius <= tiny) {
    if (abs(closure.c) <= tiny) return {TrigStatus::Degenerate, Scalar(0)};
    return {TrigStatus::Unreachable, Scalar(0)};
  }
  Scalar ratio = closure.c / radius;
  if (abs(ratio) > Scalar(1) + Scalar(kSolvabilityMargin)) return {TrigStatus::Unreachable, Scalar(0)};
  ratio = std::clamp(ratio, Scalar(-1), Scalar(1));

  const Scalar sign = branch >= 0 ? Scalar(1) : Scalar(-1);
  return {TrigStatus::Solved, normalize_angle(atan2(closure.a, closure.b) + sign * acos(ratio))};
}

// ---------------------------------------------------------------------------
// Translational stage
// ---------------------------------------------------------------------------

template <typename Scalar>
struct TlsSolution {
  Vector3<Scalar> rho = Vector3<Scalar>::Zero();
  std::optional<Leg> unreachable_leg;

  bool ok() const { return !unreachable_leg.has_value(); }
};

/// rho_u = -asin((u + f_u + r) / p_u) on the principal branch.
template <typename Scalar>
TlsSolution<Scalar> tls_ik(const Vector3<Scalar>& position, const DesignVector<Scalar>& design) {
  using std::abs;
  using std::asin;
  TlsSolution<Scalar> solution;
  for (Leg leg : kAllLegs) {
    const int k = index_of(leg);
    const Scalar ratio = (position(k) + design.f(k) + design.r) / design.p(k);
    if (!(abs(ratio) <= Scalar(1))) {
      solution.unreachable_leg = leg;
      return solution;
    }
    solution.rho(k) = -asin(ratio);
  }
  return solution;
}

template <typename Scalar>
Vector3<Scalar> tls_fk(const Vector3<Scalar>& rho, const DesignVector<Scalar>& design) {
  Vector3<Scalar> position;
  for (int k = 0; k < 3; ++k) {
    using std::sin;
    position(k) = -design.p(k) * sin(rho(k)) - design.f(k) - design.r;
  }
  return position;
}

// ---------------------------------------------------------------------------
// Transmitting stage
// ---------------------------------------------------------------------------

/// Drill-tip coordinates in the four-bar plane of leg u, with the pivot offset
/// o_u applied along w.
template <typename Scalar>
Vector2<Scalar> tms_plane_point(const Vector3<Scalar>& position, const DesignVector<Scalar>& design, Leg leg) {
  const auto frame = leg_frame<Scalar>(leg);
  const int k = index_of(leg);
  return {position(frame.axis[1]), position(frame.axis[2]) + design.o(k)};
}

/// Closure of the four-bar in delta_u for a given spherical input sigma_u.
template <typename Scalar>
TrigClosure<Scalar> tms_closure(Scalar sigma, const Vector3<Scalar>& position, Scalar rho, const DesignVector<Scalar>& design,
                                Leg leg) {
  using std::cos;
  using std::sin;
  const int k = index_of(leg);
  const Vector2<Scalar> plane = tms_plane_point(position, design, leg);
  const Scalar d = design.d(k);
  const Scalar big_v = plane(0) + design.t(k) * sin(sigma);
  const Scalar big_w = plane(1) - design.t(k) * cos(sigma) - design.p(k) * cos(rho);
  return {Scalar(2) * d * big_v, Scalar(-2) * d * big_w,
          big_v * big_v + big_w * big_w + d * d - design.c(k) * design.c(k)};
}

/// Right-hand side of the four-bar closure minus c_u^2, in mm^2.
template <typename Scalar>
Scalar tms_residual(Scalar delta, Scalar sigma, const Vector3<Scalar>& position, Scalar rho, const DesignVector<Scalar>& design,
                    Leg leg) {
  using std::cos;
  using std::sin;
  const int k = index_of(leg);
  const Vector2<Scalar> plane = tms_plane_point(position, design, leg);
  const Scalar dv = plane(0) - design.d(k) * sin(delta) + design.t(k) * sin(sigma);
  const Scalar dw = plane(1) + design.d(k) * cos(delta) - design.t(k) * cos(sigma) - design.p(k) * cos(rho);
  return dv * dv + dw * dw - design.c(k) * design.c(k);
}

// ---------------------------------------------------------------------------
// Rotational stage
// ---------------------------------------------------------------------------

template <typename Scalar>
struct SphericalLegAxes {
  Vector3<Scalar> u_alpha;
  Vector3<Scalar> u_beta;
  Vector3<Scalar> e;
};

template <typename Scalar>
Vector3<Scalar> intermediate_axis(Scalar sigma, const DesignVector<Scalar>& design, Leg leg) {
  using std::cos;
  using std::sin;
  const auto frame = leg_frame<Scalar>(leg);
  const Scalar alpha = design.alpha(index_of(leg));
  return cos(alpha) * frame.u + sin(alpha) * (cos(sigma) * frame.w - sin(sigma) * frame.v);
}

template <typename Scalar>
SphericalLegAxes<Scalar> spherical_axes(Scalar sigma, const Vector3<Scalar>& e, const DesignVector<Scalar>& design, Leg leg) {
  return {leg_frame<Scalar>(leg).u, intermediate_axis(sigma, design, leg), e};
}

/// Closure of the spherical leg in sigma_u for drill axis e(psi, theta).
template <typename Scalar>
TrigClosure<Scalar> rts_closure(Scalar psi, Scalar theta, const DesignVector<Scalar>& design, Leg leg) {
  using std::cos;
  using std::sin;
  const auto frame = leg_frame<Scalar>(leg);
  const int k = index_of(leg);
  const Vector3<Scalar> e = drill_axis(psi, theta);
  const Scalar sa = sin(design.alpha(k));
  return {-sa * frame.v.dot(e), sa * frame.w.dot(e), cos(design.beta(k)) - cos(design.alpha(k)) * frame.u.dot(e)};
}

/// u_beta . e - cos(beta_u).
template <typename Scalar>
Scalar rts_residual(Scalar sigma, const Vector3<Scalar>& e, const DesignVector<Scalar>& design, Leg leg) {
  using std::cos;
  return intermediate_axis(sigma, design, leg).dot(e) - cos(design.beta(index_of(leg)));
}

// ---------------------------------------------------------------------------
// Full cascade
// ---------------------------------------------------------------------------

enum class Stage { None, TLS, RTS, TMS };

inline constexpr std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::None: return "none";
    case Stage::TLS: return "TLS";
    case Stage::RTS: return "RTS";
    case Stage::TMS: return "TMS";
  }
  return "?";
}

/// +1 / -1 per angular leg for the spherical and four-bar closures.
struct BranchFlags {
  std::array<int, 2> rts{+1, +1};
  std::array<int, 2> tms{+1, +1};

  bool operator==(const BranchFlags&) const = default;
};

/// All 16 assignments, starting with the default (+, +, +, +).
const std::array<BranchFlags, 16>& all_branch_flags();

/// Number of stage evaluations performed by one cascade; leg-level counts.
struct StageCounters {
  int tls = 0;
  int rts = 0;
  int tms = 0;
};

template <typename Scalar>
struct IkSolution {
  bool reachable = false;
  Stage failed_stage = Stage::None;
  Leg failed_leg = Leg::X;

  JointState<Scalar> joints;
  BranchFlags branches;
  std::array<bool, 2> rts_degenerate{false, false};
  std::array<bool, 2> tms_degenerate{false, false};
  Vector2<Scalar> tms_residual = Vector2<Scalar>::Zero();  // mm^2
  Vector2<Scalar> rts_residual = Vector2<Scalar>::Zero();
  StageCounters counters;
};

template <typename Scalar>
IkSolution<Scalar> full_ik(const TaskPose<Scalar>& pose, const DesignVector<Scalar>& design, const BranchFlags& branches = {}) {
  IkSolution<Scalar> solution;
  solution.branches = branches;
  auto fail = [&](Stage stage, Leg leg) {
    solution.failed_stage = stage;
    solution.failed_leg = leg;
    return solution;
  };

  ++solution.counters.tls;
  const auto tls = tls_ik(pose.position, design);
  if (!tls.ok()) return fail(Stage::TLS, *tls.unreachable_leg);
  solution.joints.rho = tls.rho;

  for (Leg leg : kAngularLegs) {
    const int k = index_of(leg);
    ++solution.counters.rts;
    const auto sigma = solve_trig(rts_closure(pose.psi, pose.theta, design, leg), branches.rts[k]);
    if (!sigma.ok()) return fail(Stage::RTS, leg);
    solution.joints.sigma(k) = sigma.angle;
    solution.rts_degenerate[k] = sigma.status == TrigStatus::Degenerate;
  }

  for (Leg leg : kAngularLegs) {
    const int k = index_of(leg);
    ++solution.counters.tms;
    const auto closure = tms_closure(solution.joints.sigma(k), pose.position, solution.joints.rho(k), design, leg);
    const auto delta = solve_trig(closure, branches.tms[k]);
    if (!delta.ok()) return fail(Stage::TMS, leg);
    solution.joints.delta(k) = delta.angle;
    solution.tms_degenerate[k] = delta.status == TrigStatus::Degenerate;
  }

  const Vector3<Scalar> e = drill_axis(pose);
  for (Leg leg : kAngularLegs) {
    const int k = index_of(leg);
    solution.tms_residual(k) =
        tms_residual(solution.joints.delta(k), solution.joints.sigma(k), pose.position, solution.joints.rho(k), design, leg);
    solution.rts_residual(k) = rts_residual(solution.joints.sigma(k), e, design, leg);
  }
  solution.reachable = true;
  return solution;
}

/// Cascade results for every branch assignment, in all_branch_flags() order.
template <typename Scalar>
std::vector<IkSolution<Scalar>> solve_all_branches(const TaskPose<Scalar>& pose, const DesignVector<Scalar>& design) {
  std::vector<IkSolution<Scalar>> solutions;
  solutions.reserve(16);
  for (const auto& flags : all_branch_flags()) solutions.push_back(full_ik(pose, design, flags));
  return solutions;
}

/// First reachable branch assignment in all_branch_flags() order, or the
/// default-branch failure when none reaches the pose.
template <typename Scalar>
IkSolution<Scalar> first_reachable(const TaskPose<Scalar>& pose, const DesignVector<Scalar>& design) {
  IkSolution<Scalar> first_failure;
  bool have_failure = false;
  for (const auto& flags : all_branch_flags()) {
    auto solution = full_ik(pose, design, flags);
    if (solution.reachable) return solution;
    if (!have_failure) {
      first_failure = solution;
      have_failure = true;
    }
  }
  return first_failure;
}

/// Local reachability index w_L: 1 when some branch assignment reaches the pose.
template <typename Scalar>
int reach_local(const TaskPose<Scalar>& pose, const DesignVector<Scalar>& design) {
  const auto tls = tls_ik(pose.position, design);
  if (!tls.ok()) return 0;
  // Legs are independent past the TLS; each needs one RTS branch whose
  // sigma admits a four-bar closure.
  for (Leg leg : kAngularLegs) {
    const int k = index_of(leg);
    bool leg_ok = false;
    for (int rts_branch : {+1, -1}) {
      const auto sigma = solve_trig(rts_closure(pose.psi, pose.theta, design, leg), rts_branch);
      if (!sigma.ok()) break;
      if (solve_trig(tms_closure(sigma.angle, pose.position, tls.rho(k), design, leg), +1).ok()) {
        leg_ok = true;
        break;
      }
    }
    if (!leg_ok) return 0;
  }
  return 1;
}

}  // namespace arcube

#endif  // ARCUBE_KINEMATICS_HPP
