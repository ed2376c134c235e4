// Jacobian blocks of the velocity model and the assembled 3T2R relation
//
//   [ J_LV^-1   0                  ] [ v ]   [ I      0     ] [ rho_dot   ]
//   [ J_AV      J_sigma J_AS^-1 J_AP ] [ w ] = [ J_rho  J_delta ] [ delta_dot ]
//
// with v = J_LV rho_dot (TLS), J_rho rho_dot + J_delta delta_dot =
// J_AV v + J_sigma sigma_dot (TMS) and J_AS sigma_dot = J_AP omega (RTS).
//
// The TMS blocks are the partial derivatives of half the four-bar residual
//   Phi_u = (a_u^2 + b_u^2 - c_u^2) / 2,
//   a_u = V_u - d_u sin(delta_u),  b_u = W_u + d_u cos(delta_u),
// so that J_rho = dPhi/drho, J_delta = dPhi/ddelta, J_AV = -dPhi/dposition,
// J_sigma = -dPhi/dsigma.
#ifndef ARCUBE_VELOCITY_HPP
#define ARCUBE_VELOCITY_HPP

#include "arcube/core.hpp"
#include "arcube/kinematics.hpp"

#include <Eigen/LU>

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace arcube {

/// The seven blocks, in the order used by the local dexterity index.
enum class Block : int { LV = 0, AV, Sigma, AS, AP, Rho, Delta };

inline constexpr std::array<Block, 7> kAllBlocks{Block::LV, Block::AV, Block::Sigma, Block::AS,
                                                 Block::AP, Block::Rho, Block::Delta};

inline constexpr std::string_view block_name(Block block) {
  switch (block) {
    case Block::LV: return "J_LV";
    case Block::AV: return "J_AV";
    case Block::Sigma: return "J_sigma";
    case Block::AS: return "J_AS";
    case Block::AP: return "J_AP";
    case Block::Rho: return "J_rho";
    case Block::Delta: return "J_delta";
  }
  return "?";
}

class SingularityError : public std::runtime_error {
 public:
  SingularityError(std::string_view block, const std::string& what)
      : std::runtime_error(what), block_(block) {}
  std::string_view block() const { return block_; }

 private:
  std::string_view block_;
};

inline constexpr double kTlsSingularCos = 1e-9;
inline constexpr double kScaledSingular = 1e-12;

template <typename Scalar>
struct JacobianSet {
  using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;
  using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
  using Matrix23 = Eigen::Matrix<Scalar, 2, 3>;

  Matrix3 lv = Matrix3::Zero();
  Matrix2 rho = Matrix2::Zero();    // columns: rho_x, rho_y
  Matrix2 delta = Matrix2::Zero();
  Matrix23 av = Matrix23::Zero();   // columns: x, y, z
  Matrix2 sigma = Matrix2::Zero();
  Matrix2 as = Matrix2::Zero();
  Matrix23 ap = Matrix23::Zero();   // columns: omega_x, omega_y, omega_z

  Eigen::Matrix<Scalar, 5, 6> task_side = Eigen::Matrix<Scalar, 5, 6>::Zero();
  Eigen::Matrix<Scalar, 5, 5> joint_side = Eigen::Matrix<Scalar, 5, 5>::Zero();

  /// First singular block detected, if any.
  std::optional<Block> singular;

  /// The block as a dynamic matrix, for conditioning.
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> block(Block which) const {
    switch (which) {
      case Block::LV: return lv;
      case Block::AV: return av;
      case Block::Sigma: return sigma;
      case Block::AS: return as;
      case Block::AP: return ap;
      case Block::Rho: return rho;
      case Block::Delta: return delta;
    }
    return {};
  }
};

/// J_LV = diag(-p_u cos(rho_u)).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> j_lv(const Vector3<Scalar>& rho, const DesignVector<Scalar>& design) {
  using std::cos;
  Eigen::Matrix<Scalar, 3, 3> jacobian = Eigen::Matrix<Scalar, 3, 3>::Zero();
  for (int k = 0; k < 3; ++k) jacobian(k, k) = -design.p(k) * cos(rho(k));
  return jacobian;
}

template <typename Scalar>
bool tls_singular(const Vector3<Scalar>& rho) {
  using std::abs;
  using std::cos;
  for (int k = 0; k < 3; ++k)
    if (abs(cos(rho(k))) < Scalar(kTlsSingularCos)) return true;
  return false;
}

template <typename Scalar>
struct TmsBlocks {
  Eigen::Matrix<Scalar, 2, 2> rho = Eigen::Matrix<Scalar, 2, 2>::Zero();
  Eigen::Matrix<Scalar, 2, 2> delta = Eigen::Matrix<Scalar, 2, 2>::Zero();
  Eigen::Matrix<Scalar, 2, 3> av = Eigen::Matrix<Scalar, 2, 3>::Zero();
  Eigen::Matrix<Scalar, 2, 2> sigma = Eigen::Matrix<Scalar, 2, 2>::Zero();
  bool singular_delta = false;
  bool singular_sigma = false;
};

template <typename Scalar>
TmsBlocks<Scalar> tms_velocity_blocks(const JointState<Scalar>& joints, const Vector3<Scalar>& position,
                                      const DesignVector<Scalar>& design) {
  using std::abs;
  using std::cos;
  using std::sin;
  TmsBlocks<Scalar> blocks;
  for (Leg leg : kAngularLegs) {
    const int k = index_of(leg);
    const auto frame = leg_frame<Scalar>(leg);
    const Vector2<Scalar> plane = tms_plane_point(position, design, leg);
    const Scalar rho = joints.rho(k), delta = joints.delta(k), sigma = joints.sigma(k);
    const Scalar d = design.d(k), t = design.t(k), p = design.p(k), c = design.c(k);

    const Scalar a = plane(0) + t * sin(sigma) - d * sin(delta);
    const Scalar b = plane(1) - t * cos(sigma) - p * cos(rho) + d * cos(delta);

    blocks.rho(k, k) = b * p * sin(rho);
    blocks.delta(k, k) = -d * (a * cos(delta) + b * sin(delta));
    blocks.sigma(k, k) = -t * (a * cos(sigma) + b * sin(sigma));
    blocks.av(k, frame.axis[1]) = -a;
    blocks.av(k, frame.axis[2]) = -b;

    if (abs(blocks.delta(k, k)) < Scalar(kScaledSingular) * d * c) blocks.singular_delta = true;
    if (abs(blocks.sigma(k, k)) < Scalar(kScaledSingular) * t * c) blocks.singular_sigma = true;
  }
  return blocks;
}

template <typename Scalar>
struct RtsBlocks {
  Eigen::Matrix<Scalar, 2, 2> as = Eigen::Matrix<Scalar, 2, 2>::Zero();
  Eigen::Matrix<Scalar, 2, 3> ap = Eigen::Matrix<Scalar, 2, 3>::Zero();
  bool singular = false;
};

/// J_AS = diag((u_alpha x u_beta) . e), rows of J_AP = (u_beta x e)^T.
template <typename Scalar>
RtsBlocks<Scalar> rts_velocity_blocks(const JointState<Scalar>& joints, const Vector3<Scalar>& e,
                                      const DesignVector<Scalar>& design) {
  using std::abs;
  RtsBlocks<Scalar> blocks;
  for (Leg leg : kAngularLegs) {
    const int k = index_of(leg);
    const auto axes = spherical_axes(joints.sigma(k), e, design, leg);
    blocks.as(k, k) = axes.u_alpha.cross(axes.u_beta).dot(e);
    blocks.ap.row(k) = axes.u_beta.cross(e).transpose();
    if (abs(blocks.as(k, k)) < Scalar(kScaledSingular)) blocks.singular = true;
  }
  return blocks;
}

/// Places the blocks into the task-side (5x6) and joint-side (5x5) matrices.
/// The top-left task block is J_LV^-1 so that both v = J_LV rho_dot and the
/// identity on the joint side hold; the 2x2 J_AS is inverted in closed form.
template <typename Scalar>
void assemble(JacobianSet<Scalar>& set) {
  set.task_side.setZero();
  set.joint_side.setZero();
  for (int k = 0; k < 3; ++k) set.task_side(k, k) = Scalar(1) / set.lv(k, k);
  set.task_side.template block<2, 3>(3, 0) = set.av;

  const Scalar det = set.as(0, 0) * set.as(1, 1) - set.as(0, 1) * set.as(1, 0);
  Eigen::Matrix<Scalar, 2, 2> as_inverse;
  as_inverse << set.as(1, 1), -set.as(0, 1), -set.as(1, 0), set.as(0, 0);
  as_inverse /= det;
  set.task_side.template block<2, 3>(3, 3) = set.sigma * as_inverse * set.ap;

  set.joint_side.template block<3, 3>(0, 0).setIdentity();
  set.joint_side.template block<2, 2>(3, 0) = set.rho;
  set.joint_side.template block<2, 2>(3, 3) = set.delta;
}

/// All seven blocks at a solved configuration, assembled.
template <typename Scalar>
JacobianSet<Scalar> jacobians(const JointState<Scalar>& joints, const TaskPose<Scalar>& pose,
                              const DesignVector<Scalar>& design) {
  JacobianSet<Scalar> set;
  set.lv = j_lv(joints.rho, design);
  if (tls_singular(joints.rho)) set.singular = Block::LV;

  const auto tms = tms_velocity_blocks(joints, pose.position, design);
  set.rho = tms.rho;
  set.delta = tms.delta;
  set.av = tms.av;
  set.sigma = tms.sigma;

  const auto rts = rts_velocity_blocks(joints, drill_axis(pose), design);
  set.as = rts.as;
  set.ap = rts.ap;

  if (!set.singular) {
    if (rts.singular) set.singular = Block::AS;
    else if (tms.singular_delta) set.singular = Block::Delta;
    else if (tms.singular_sigma) set.singular = Block::Sigma;
  }
  if (!rts.singular) assemble(set);
  return set;
}

/// Angular velocity of the drill axis for angle rates (psi_dot, theta_dot),
/// taken perpendicular to e: omega = e x e_dot.
template <typename Scalar>
Vector3<Scalar> axis_angular_velocity(Scalar psi, Scalar theta, Scalar psi_dot, Scalar theta_dot) {
  const Vector3<Scalar> e = drill_axis(psi, theta);
  const Vector3<Scalar> e_dot = drill_axis_partials(psi, theta) * Vector2<Scalar>(psi_dot, theta_dot);
  return e.cross(e_dot);
}

template <typename Scalar>
struct TaskRate {
  Vector3<Scalar> linear = Vector3<Scalar>::Zero();  // mm/s
  Scalar psi_dot = Scalar(0);                        // rad/s
  Scalar theta_dot = Scalar(0);
};

template <typename Scalar>
struct JointRates {
  Vector3<Scalar> rho_dot = Vector3<Scalar>::Zero();
  Vector2<Scalar> delta_dot = Vector2<Scalar>::Zero();
  Vector2<Scalar> sigma_dot = Vector2<Scalar>::Zero();
};

/// Solves the assembled relation for the five active joint rates.
/// Throws SingularityError naming the offending block, or "e(psi,theta)" at
/// the pole of the axis parameterization.
template <typename Scalar>
JointRates<Scalar> inverse_velocity(const TaskRate<Scalar>& rate, const JointState<Scalar>& joints,
                                    const TaskPose<Scalar>& pose, const DesignVector<Scalar>& design) {
  using std::abs;
  using std::sin;
  if (abs(sin(pose.theta)) < Scalar(kScaledSingular))
    throw SingularityError("e(psi,theta)", "drill-axis parameterization is singular at theta = 0");

  const auto set = jacobians(joints, pose, design);
  if (set.singular)
    throw SingularityError(block_name(*set.singular),
                           "singular configuration: " + std::string(block_name(*set.singular)));

  Eigen::Matrix<Scalar, 6, 1> task;
  task << rate.linear, axis_angular_velocity(pose.psi, pose.theta, rate.psi_dot, rate.theta_dot);
  const Eigen::Matrix<Scalar, 5, 1> rhs = set.task_side * task;
  const Eigen::Matrix<Scalar, 5, 1> q_dot = set.joint_side.partialPivLu().solve(rhs);

  JointRates<Scalar> rates;
  rates.rho_dot = q_dot.template head<3>();
  rates.delta_dot = q_dot.template tail<2>();
  for (int k = 0; k < 2; ++k) rates.sigma_dot(k) = set.ap.row(k).dot(task.template tail<3>()) / set.as(k, k);
  return rates;
}

}  // namespace arcube

#endif  // ARCUBE_VELOCITY_HPP
