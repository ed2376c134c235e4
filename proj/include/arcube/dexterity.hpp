// Condition-number dexterity and reachability indices over trajectory points.
//
//   eta_L = max over the seven blocks of kappa(J)     (worst-case conditioning)
//   eta_G = mean of eta_L over all n points
//   w_G   = product of w_L over all n points
#ifndef ARCUBE_DEXTERITY_HPP
#define ARCUBE_DEXTERITY_HPP

#include "arcube/core.hpp"
#include "arcube/kinematics.hpp"
#include "arcube/trajectory.hpp"
#include "arcube/velocity.hpp"

#include <Eigen/SVD>

#include <array>
#include <cmath>
#include <iosfwd>
#include <limits>
#include <vector>

namespace arcube {

inline constexpr double kConditionCutoff = 1e-14;

/// Spectral condition number sigma_max / sigma_min over the min(rows, cols)
/// singular values; +inf when sigma_min < 1e-14 sigma_max.
template <typename Derived>
typename Derived::Scalar cond(const Eigen::MatrixBase<Derived>& matrix) {
  using Scalar = typename Derived::Scalar;
  using Plain = typename Derived::PlainObject;
  const Plain dense = matrix;
  if (dense.size() == 0) return Scalar(1);
  const auto values = Eigen::JacobiSVD<Plain>(dense).singularValues();
  const Scalar largest = values.maxCoeff();
  const Scalar smallest = values.minCoeff();
  if (!(largest > Scalar(0)) || smallest < Scalar(kConditionCutoff) * largest)
    return std::numeric_limits<Scalar>::infinity();
  return largest / smallest;
}

/// Condition number of one block of the set.
template <typename Scalar>
Scalar block_condition(const JacobianSet<Scalar>& set, Block block) {
  switch (block) {
    case Block::LV: return cond(set.lv);
    case Block::AV: return cond(set.av);
    case Block::Sigma: return cond(set.sigma);
    case Block::AS: return cond(set.as);
    case Block::AP: return cond(set.ap);
    case Block::Rho: return cond(set.rho);
    case Block::Delta: return cond(set.delta);
  }
  return std::numeric_limits<Scalar>::infinity();
}

template <typename Scalar>
struct LocalDexterity {
  bool reachable = false;
  Stage failed_stage = Stage::None;
  Leg failed_leg = Leg::X;
  Scalar eta = std::numeric_limits<Scalar>::infinity();
  Block dominating = Block::LV;
  std::array<Scalar, 7> kappa{};
  BranchFlags branches;
};

/// eta_L for one solved configuration.
template <typename Scalar>
LocalDexterity<Scalar> eta_for_solution(const IkSolution<Scalar>& solution, const TaskPose<Scalar>& pose,
                                        const DesignVector<Scalar>& design) {
  LocalDexterity<Scalar> local;
  local.branches = solution.branches;
  local.reachable = solution.reachable;
  local.failed_stage = solution.failed_stage;
  local.failed_leg = solution.failed_leg;
  if (!solution.reachable) return local;

  const auto set = jacobians(solution.joints, pose, design);
  local.eta = Scalar(0);
  for (Block block : kAllBlocks) {
    const int k = static_cast<int>(block);
    local.kappa[k] = block_condition(set, block);
    if (local.kappa[k] > local.eta) {
      local.eta = local.kappa[k];
      local.dominating = block;
    }
  }
  return local;
}

/// eta_L at a pose. Every branch assignment is solved and the best
/// conditioned reachable posture is kept (ties go to the earlier assignment);
/// with no reachable assignment the default-branch failure is reported.
template <typename Scalar>
LocalDexterity<Scalar> eta_local(const TaskPose<Scalar>& pose, const DesignVector<Scalar>& design) {
  LocalDexterity<Scalar> best;
  bool have_reachable = false;
  for (const auto& flags : all_branch_flags()) {
    const auto solution = full_ik(pose, design, flags);
    if (!solution.reachable) {
      if (!have_reachable && flags == BranchFlags{}) best = eta_for_solution(solution, pose, design);
      continue;
    }
    auto local = eta_for_solution(solution, pose, design);
    if (!have_reachable || local.eta < best.eta) {
      best = local;
      have_reachable = true;
    }
  }
  return best;
}

/// eta_L for a fixed branch assignment.
template <typename Scalar>
LocalDexterity<Scalar> eta_local(const TaskPose<Scalar>& pose, const DesignVector<Scalar>& design,
                                 const BranchFlags& branches) {
  return eta_for_solution(full_ik(pose, design, branches), pose, design);
}

/// 100 / eta, with 0 for a singular point.
template <typename Scalar>
Scalar invert_percent(Scalar eta) {
  using std::isinf;
  if (isinf(eta)) return Scalar(0);
  return Scalar(100) / eta;
}

struct DexterityRow {
  int traj_id = 0;
  int point_index = 0;
  TaskPose<double> world_pose;  // as given in the trajectory file
  int w_local = 0;
  double eta_local = std::numeric_limits<double>::infinity();
  double percent = 0.0;
  Block dominating = Block::LV;
  Stage failed_stage = Stage::None;
  Leg failed_leg = Leg::X;
};

struct DexterityReport {
  std::vector<DexterityRow> rows;
  int w_global = 0;
  /// Mean eta_L. When `valid` is false this is the mean over the reachable,
  /// finite points only (NaN if there are none).
  double eta_global = std::numeric_limits<double>::quiet_NaN();
  bool valid = false;
  std::size_t unreachable_count = 0;
  std::size_t singular_count = 0;
};

/// Compensated (Neumaier) sum; order-insensitive to within a few ulps.
double compensated_sum(const std::vector<double>& values);

/// Evaluates every point; `threads` = 0 picks the ARCUBE_THREADS default.
/// Results do not depend on the thread count. Throws TrajectoryError on an
/// empty bundle.
DexterityReport eta_global(const TrajectoryBundle& bundle, const Design& design, unsigned threads = 0);

/// Same, for points already expressed in R_m.
DexterityReport eta_global(const std::vector<TrajectoryPoint>& mechanism_points, const Design& design,
                           unsigned threads = 0);

/// Plot-ready CSV, one row per point:
///   traj_id,point_index,x,y,z,psi_deg,theta_deg,w_L,eta_L,dexterity_percent,dominating_block
void write_dexterity_csv(std::ostream& out, const DexterityReport& report);

}  // namespace arcube

#endif  // ARCUBE_DEXTERITY_HPP
