// Drilling trajectories: discretization, world/mechanism frames, CSV files,
// and a seeded generator of pedicle-style trajectory sets.
#ifndef ARCUBE_TRAJECTORY_HPP
#define ARCUBE_TRAJECTORY_HPP

#include "arcube/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace arcube {

class TrajectoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultPointsPerTrajectory = 30;

/// Straight drilling path with a constant drill-axis orientation. Positions
/// are in the world frame R_w.
struct DrillTrajectory {
  int id = 0;
  Eigen::Vector3d entry = Eigen::Vector3d::Zero();
  Eigen::Vector3d target = Eigen::Vector3d::Zero();
  double psi = 0.0;
  double theta = 0.0;
  int n_pts = kDefaultPointsPerTrajectory;

  bool operator==(const DrillTrajectory&) const = default;
};

struct TrajectoryBundle {
  std::vector<DrillTrajectory> trajectories;

  /// Total number of discretized points over all trajectories.
  std::size_t point_count() const;
  bool operator==(const TrajectoryBundle&) const = default;
};

/// One discretized point, tagged with its trajectory and index.
struct TrajectoryPoint {
  int traj_id = 0;
  int point_index = 0;
  TaskPose<double> pose;
};

/// n_pts equally spaced poses from entry to target inclusive. Endpoints are
/// reproduced exactly. Throws TrajectoryError when entry == target or n_pts < 2.
std::vector<TaskPose<double>> discretize(const DrillTrajectory& trajectory);

/// R_m differs from R_w by the pure translation m.
Eigen::Vector3d to_mechanism(const Eigen::Vector3d& world, const Design& design);
Eigen::Vector3d to_world(const Eigen::Vector3d& mechanism, const Design& design);

/// Every discretized point of the bundle expressed in R_m, in bundle order.
std::vector<TrajectoryPoint> to_mechanism_frame(const TrajectoryBundle& bundle, const Design& design);

/// Every discretized point in R_w (no transform), in bundle order.
std::vector<TrajectoryPoint> world_points(const TrajectoryBundle& bundle);

/// Box of entry points plus a cone of drill-axis directions, world frame.
struct SyntheticRegion {
  Eigen::Vector3d center{-36.0, -88.0, 152.0};
  Eigen::Vector3d half_extent{3.0, 10.0, 4.0};
  double cone_psi = 0.0;
  double cone_theta = deg_to_rad(15.0);
  double cone_half_angle = deg_to_rad(5.0);
  double min_length = 25.0;
  double max_length = 35.0;
  /// Minimum half-separation of paired entries along y.
  double min_pair_offset = 4.0;
  int n_pts = kDefaultPointsPerTrajectory;
};

/// Deterministic pseudo-random bundle: trajectories come in left/right pairs
/// mirrored about the region's y-centre, each drilled along -e from its
/// entry. Same (seed, count, region) gives a bit-identical bundle.
TrajectoryBundle synthetic_bundle(std::uint64_t seed, int count, const SyntheticRegion& region = {});

/// CSV with header
///   traj_id,entry_x,entry_y,entry_z,target_x,target_y,target_z,psi_deg,theta_deg,n_pts
/// Lines starting with '#' are skipped.
TrajectoryBundle read_trajectory_csv(std::istream& in);
TrajectoryBundle load_trajectory_csv(const std::string& path);
void write_trajectory_csv(std::ostream& out, const TrajectoryBundle& bundle);
void save_trajectory_csv(const std::string& path, const TrajectoryBundle& bundle);

}  // namespace arcube

#endif  // ARCUBE_TRAJECTORY_HPP
