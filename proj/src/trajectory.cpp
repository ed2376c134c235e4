#include "arcube/trajectory.hpp"

#include "arcube/number_format.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string_view>

namespace arcube {

namespace {

constexpr std::string_view kHeader =
    "traj_id,entry_x,entry_y,entry_z,target_x,target_y,target_z,psi_deg,theta_deg,n_pts";

std::vector<std::string_view> split(std::string_view line, char separator) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(separator, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  return text;
}

void check_trajectory(const DrillTrajectory& trajectory) {
  if (trajectory.n_pts < 2)
    throw TrajectoryError("trajectory " + std::to_string(trajectory.id) + ": n_pts must be at least 2");
  if (trajectory.entry == trajectory.target)
    throw TrajectoryError("trajectory " + std::to_string(trajectory.id) + ": entry and target coincide");
}

Eigen::Vector3d direction_in_cone(std::mt19937_64& rng, const Eigen::Vector3d& axis, double half_angle) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double cos_tilt = 1.0 - unit(rng) * (1.0 - std::cos(half_angle));
  const double sin_tilt = std::sqrt(std::max(0.0, 1.0 - cos_tilt * cos_tilt));
  const double azimuth = 2.0 * std::numbers::pi * unit(rng);
  const Eigen::Vector3d local(sin_tilt * std::cos(azimuth), sin_tilt * std::sin(azimuth), cos_tilt);
  return Eigen::Quaterniond::FromTwoVectors(Eigen::Vector3d::UnitZ(), axis) * local;
}

DrillTrajectory make_trajectory(int id, const Eigen::Vector3d& entry, const Eigen::Vector3d& direction, double length,
                                int n_pts) {
  auto [psi, theta] = axis_angles(direction);
  DrillTrajectory trajectory;
  trajectory.id = id;
  trajectory.psi = snap_to_degree_grid(psi);
  trajectory.theta = snap_to_degree_grid(theta);
  trajectory.entry = entry;
  trajectory.target = entry - length * drill_axis(trajectory.psi, trajectory.theta);
  trajectory.n_pts = n_pts;
  return trajectory;
}

}  // namespace

std::size_t TrajectoryBundle::point_count() const {
  std::size_t total = 0;
  for (const auto& trajectory : trajectories) total += static_cast<std::size_t>(trajectory.n_pts);
  return total;
}

std::vector<TaskPose<double>> discretize(const DrillTrajectory& trajectory) {
  check_trajectory(trajectory);
  const int last = trajectory.n_pts - 1;
  const Eigen::Vector3d span = trajectory.target - trajectory.entry;
  std::vector<TaskPose<double>> poses(static_cast<std::size_t>(trajectory.n_pts));
  for (int i = 0; i <= last; ++i) {
    auto& pose = poses[static_cast<std::size_t>(i)];
    if (i == 0) pose.position = trajectory.entry;
    else if (i == last) pose.position = trajectory.target;
    else pose.position = trajectory.entry + (span * static_cast<double>(i)) / static_cast<double>(last);
    pose.psi = trajectory.psi;
    pose.theta = trajectory.theta;
  }
  return poses;
}

Eigen::Vector3d to_mechanism(const Eigen::Vector3d& world, const Design& design) { return world - design.m; }

Eigen::Vector3d to_world(const Eigen::Vector3d& mechanism, const Design& design) { return mechanism + design.m; }

std::vector<TrajectoryPoint> world_points(const TrajectoryBundle& bundle) {
  std::vector<TrajectoryPoint> points;
  points.reserve(bundle.point_count());
  for (const auto& trajectory : bundle.trajectories) {
    const auto poses = discretize(trajectory);
    for (std::size_t i = 0; i < poses.size(); ++i)
      points.push_back({trajectory.id, static_cast<int>(i), poses[i]});
  }
  return points;
}

std::vector<TrajectoryPoint> to_mechanism_frame(const TrajectoryBundle& bundle, const Design& design) {
  auto points = world_points(bundle);
  for (auto& point : points) point.pose.position = to_mechanism(point.pose.position, design);
  return points;
}

TrajectoryBundle synthetic_bundle(std::uint64_t seed, int count, const SyntheticRegion& region) {
  if (count < 1) throw TrajectoryError("synthetic bundle needs at least one trajectory");
  if (!(region.half_extent.array() > 0.0).all() || !(region.cone_half_angle > 0.0) ||
      !(region.min_length > 0.0 && region.min_length <= region.max_length) ||
      !(region.min_pair_offset >= 0.0 && region.min_pair_offset <= region.half_extent.y()))
    throw TrajectoryError("synthetic region is empty");

  std::seed_seq sequence{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x41524355u};
  std::mt19937_64 rng(sequence);
  std::uniform_real_distribution<double> symmetric(-1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const Eigen::Vector3d axis = drill_axis(region.cone_psi, region.cone_theta);
  const double cos_limit = std::cos(region.cone_half_angle);
  auto length = [&] { return region.min_length + unit(rng) * (region.max_length - region.min_length); };

  TrajectoryBundle bundle;
  int id = 1;
  while (id <= count) {
    const double offset_y =
        region.min_pair_offset + unit(rng) * (region.half_extent.y() - region.min_pair_offset);
    const Eigen::Vector3d offset(symmetric(rng) * region.half_extent.x(), offset_y, symmetric(rng) * region.half_extent.z());

    const Eigen::Vector3d left_direction = direction_in_cone(rng, axis, region.cone_half_angle);
    bundle.trajectories.push_back(make_trajectory(id++, region.center + offset, left_direction, length(), region.n_pts));
    if (id > count) break;

    Eigen::Vector3d right_direction(left_direction.x(), -left_direction.y(), left_direction.z());
    if (right_direction.dot(axis) < cos_limit) right_direction = direction_in_cone(rng, axis, region.cone_half_angle);
    const Eigen::Vector3d mirrored(offset.x(), -offset.y(), offset.z());
    bundle.trajectories.push_back(make_trajectory(id++, region.center + mirrored, right_direction, length(), region.n_pts));
  }
  return bundle;
}

TrajectoryBundle read_trajectory_csv(std::istream& in) {
  TrajectoryBundle bundle;
  std::string line;
  bool have_header = false;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    if (!have_header) {
      if (view != kHeader) throw TrajectoryError("line " + std::to_string(line_number) + ": expected header '" +
                                                 std::string(kHeader) + "'");
      have_header = true;
      continue;
    }
    const auto fields = split(view, ',');
    if (fields.size() != 10)
      throw TrajectoryError("line " + std::to_string(line_number) + ": expected 10 fields, got " +
                            std::to_string(fields.size()));
    try {
      DrillTrajectory trajectory;
      trajectory.id = static_cast<int>(parse_integer(fields[0]));
      for (int k = 0; k < 3; ++k) {
        trajectory.entry(k) = parse_double(fields[1 + k]);
        trajectory.target(k) = parse_double(fields[4 + k]);
      }
      trajectory.psi = deg_to_rad(parse_double(fields[7]));
      trajectory.theta = deg_to_rad(parse_double(fields[8]));
      trajectory.n_pts = static_cast<int>(parse_integer(fields[9]));
      check_trajectory(trajectory);
      bundle.trajectories.push_back(trajectory);
    } catch (const std::invalid_argument& error) {
      throw TrajectoryError("line " + std::to_string(line_number) + ": " + error.what());
    } catch (const TrajectoryError& error) {
      throw TrajectoryError("line " + std::to_string(line_number) + ": " + error.what());
    }
  }
  if (!have_header) throw TrajectoryError("trajectory file has no header row");
  if (bundle.trajectories.empty()) throw TrajectoryError("trajectory file has no trajectories");
  return bundle;
}

TrajectoryBundle load_trajectory_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TrajectoryError("cannot open trajectory file '" + path + "'");
  return read_trajectory_csv(in);
}

void write_trajectory_csv(std::ostream& out, const TrajectoryBundle& bundle) {
  out << kHeader << '\n';
  for (const auto& trajectory : bundle.trajectories) {
    out << trajectory.id;
    for (int k = 0; k < 3; ++k) out << ',' << format_double(trajectory.entry(k));
    for (int k = 0; k < 3; ++k) out << ',' << format_double(trajectory.target(k));
    out << ',' << format_degrees(trajectory.psi) << ',' << format_degrees(trajectory.theta) << ',' << trajectory.n_pts
        << '\n';
  }
}

void save_trajectory_csv(const std::string& path, const TrajectoryBundle& bundle) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TrajectoryError("cannot write trajectory file '" + path + "'");
  write_trajectory_csv(out, bundle);
}

}  // namespace arcube
