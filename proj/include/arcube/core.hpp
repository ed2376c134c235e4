// Shared geometric vocabulary of the AR-CUBE 3T2R mechanism: design vector,
// task pose, joint state, and the per-leg coordinate triads.
//
// Frame conventions
//   R_m      mechanism frame; every kinematic quantity is expressed in it.
//   leg u    one of x, y, z. Its triad (u, v, w) is the cyclic permutation of
//            (x_m, y_m, z_m) starting at u. The proximal joint of leg u turns
//            about v, the distal joint and the spherical input joint about u.
//   e        drill axis, spherical coordinates about z_m (azimuth psi, polar theta).
//
// Lengths are millimetres, angles radians.
#ifndef ARCUBE_CORE_HPP
#define ARCUBE_CORE_HPP

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace arcube {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

enum class Leg : int { X = 0, Y = 1, Z = 2 };

inline constexpr std::array<Leg, 3> kAllLegs{Leg::X, Leg::Y, Leg::Z};
/// Legs whose distal linkage carries angular motion to the spherical stage.
inline constexpr std::array<Leg, 2> kAngularLegs{Leg::X, Leg::Y};

inline constexpr int index_of(Leg leg) { return static_cast<int>(leg); }

inline constexpr std::string_view leg_name(Leg leg) {
  switch (leg) {
    case Leg::X: return "x";
    case Leg::Y: return "y";
    case Leg::Z: return "z";
  }
  return "?";
}

class DesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
constexpr Scalar deg_to_rad(Scalar deg) {
  return deg * (std::numbers::pi_v<Scalar> / Scalar(180));
}

template <typename Scalar>
constexpr Scalar rad_to_deg(Scalar rad) {
  return rad * (Scalar(180) / std::numbers::pi_v<Scalar>);
}

/// Wraps an angle into (-pi, pi].
template <typename Scalar>
Scalar normalize_angle(Scalar angle) {
  using std::remainder;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  Scalar wrapped = remainder(angle, Scalar(2) * pi);
  if (wrapped <= -pi) wrapped += Scalar(2) * pi;
  return wrapped;
}

/// The 23 optimizable dimensions. Per-leg arrays are indexed by index_of(leg);
/// two-entry arrays exist for legs x and y only.
template <typename Scalar>
struct DesignVector {
  static constexpr int kSize = 23;
  using Flat = Eigen::Matrix<Scalar, kSize, 1>;

  Vector3<Scalar> m = Vector3<Scalar>::Zero();  // base position
  Vector3<Scalar> f = Vector3<Scalar>::Zero();  // frame links
  Vector3<Scalar> p = Vector3<Scalar>::Zero();  // proximal links
  Vector3<Scalar> d = Vector3<Scalar>::Zero();  // distal links
  Vector2<Scalar> c = Vector2<Scalar>::Zero();  // coupling links
  Vector2<Scalar> t = Vector2<Scalar>::Zero();  // transmitting links
  Scalar r = Scalar(0);                         // spherical stage radius
  Vector2<Scalar> o = Vector2<Scalar>::Zero();  // transmitting pivot offsets (signed)
  Vector2<Scalar> alpha = Vector2<Scalar>::Zero();
  Vector2<Scalar> beta = Vector2<Scalar>::Zero();

  /// Flat layout: m(3) f(3) p(3) d(3) c(2) t(2) r o(2) alpha(2) beta(2).
  Flat flatten() const {
    Flat flat;
    flat << m, f, p, d, c, t, r, o, alpha, beta;
    return flat;
  }

  static DesignVector unflatten(const Flat& flat) {
    DesignVector design;
    design.m = flat.template segment<3>(0);
    design.f = flat.template segment<3>(3);
    design.p = flat.template segment<3>(6);
    design.d = flat.template segment<3>(9);
    design.c = flat.template segment<2>(12);
    design.t = flat.template segment<2>(14);
    design.r = flat(16);
    design.o = flat.template segment<2>(17);
    design.alpha = flat.template segment<2>(19);
    design.beta = flat.template segment<2>(21);
    return design;
  }

  template <typename Other>
  DesignVector<Other> cast() const {
    return DesignVector<Other>::unflatten(flatten().template cast<Other>());
  }

  bool operator==(const DesignVector& other) const { return flatten() == other.flatten(); }
};

using Design = DesignVector<double>;

/// Parameter names in flat order, e.g. "p_x", "alpha_y", "r".
const std::array<std::string_view, Design::kSize>& parameter_names();

/// True when the flat index addresses a spherical link angle.
constexpr bool is_angle_parameter(int flat_index) { return flat_index >= 19; }

/// Returns the first violated validity rule, if any.
template <typename Scalar>
std::optional<std::string> design_problem(const DesignVector<Scalar>& design) {
  const auto flat = design.flatten();
  if (!flat.allFinite()) return "design contains a non-finite value";
  const auto& names = parameter_names();
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  for (int i = 3; i < Design::kSize; ++i) {
    if (i >= 17 && i < 19) continue;  // offsets o may take any sign
    if (is_angle_parameter(i)) {
      if (!(flat(i) > Scalar(0) && flat(i) < pi))
        return std::string(names[i]) + " must lie in (0, pi)";
    } else if (!(flat(i) > Scalar(0))) {
      return std::string(names[i]) + " must be strictly positive";
    }
  }
  return std::nullopt;
}

template <typename Scalar>
void require_valid(const DesignVector<Scalar>& design) {
  if (auto problem = design_problem(design)) throw DesignError(*problem);
}

/// Optimum dimensions reported for the drilling task. Spherical link angles
/// are published without a unit; they are read as degrees.
template <typename Scalar = double>
DesignVector<Scalar> design_from_table2() {
  DesignVector<Scalar> design;
  design.m << Scalar(31.8694), Scalar(11.9589), Scalar(192.0769);
  design.f << Scalar(123.1147), Scalar(116.9719), Scalar(56.7787);
  design.p << Scalar(134.099), Scalar(149.9886), Scalar(99.8766);
  design.d << Scalar(79.2596), Scalar(99.9402), Scalar(53.5671);
  design.c << Scalar(139.8911), Scalar(106.8319);
  design.t << Scalar(70.9301), Scalar(65.3946);
  design.r = Scalar(70.4466);
  design.o << Scalar(-19.2229), Scalar(43.2917);
  design.alpha << deg_to_rad(Scalar(52.6402)), deg_to_rad(Scalar(66.446));
  design.beta << deg_to_rad(Scalar(50.0038)), deg_to_rad(Scalar(62.1208));
  return design;
}

/// Drill-tip position plus drill-axis angles, in R_m unless stated otherwise.
template <typename Scalar>
struct TaskPose {
  Vector3<Scalar> position = Vector3<Scalar>::Zero();
  Scalar psi = Scalar(0);
  Scalar theta = Scalar(0);
};

/// Active joints rho (proximal), delta (distal) and the dependent spherical
/// inputs sigma.
template <typename Scalar>
struct JointState {
  Vector3<Scalar> rho = Vector3<Scalar>::Zero();
  Vector2<Scalar> delta = Vector2<Scalar>::Zero();
  Vector2<Scalar> sigma = Vector2<Scalar>::Zero();
};

template <typename Scalar>
struct LegFrame {
  Leg leg = Leg::X;
  std::array<int, 3> axis{0, 1, 2};  // R_m component indices of (u, v, w)
  Vector3<Scalar> u, v, w;
};

template <typename Scalar = double>
LegFrame<Scalar> leg_frame(Leg leg) {
  LegFrame<Scalar> frame;
  frame.leg = leg;
  const int k = index_of(leg);
  frame.axis = {k, (k + 1) % 3, (k + 2) % 3};
  frame.u = Vector3<Scalar>::Unit(frame.axis[0]);
  frame.v = Vector3<Scalar>::Unit(frame.axis[1]);
  frame.w = Vector3<Scalar>::Unit(frame.axis[2]);
  return frame;
}

template <typename Scalar>
Vector3<Scalar> drill_axis(Scalar psi, Scalar theta) {
  using std::cos;
  using std::sin;
  const Scalar st = sin(theta);
  return Vector3<Scalar>(cos(psi) * st, sin(psi) * st, cos(theta));
}

template <typename Scalar>
Vector3<Scalar> drill_axis(const TaskPose<Scalar>& pose) {
  return drill_axis(pose.psi, pose.theta);
}

/// Partial derivatives of the drill axis with respect to (psi, theta), as columns.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 2> drill_axis_partials(Scalar psi, Scalar theta) {
  using std::cos;
  using std::sin;
  Eigen::Matrix<Scalar, 3, 2> partials;
  partials.col(0) << -sin(psi) * sin(theta), cos(psi) * sin(theta), Scalar(0);
  partials.col(1) << cos(psi) * cos(theta), sin(psi) * cos(theta), -sin(theta);
  return partials;
}

/// Recovers (psi, theta) from a unit axis. psi is 0 on the pole.
template <typename Scalar>
std::pair<Scalar, Scalar> axis_angles(const Vector3<Scalar>& axis) {
  using std::atan2;
  using std::hypot;
  const Scalar planar = hypot(axis.x(), axis.y());
  const Scalar theta = atan2(planar, axis.z());
  const Scalar psi = planar > Scalar(0) ? atan2(axis.y(), axis.x()) : Scalar(0);
  return {psi, theta};
}

}  // namespace arcube

#endif  // ARCUBE_CORE_HPP
