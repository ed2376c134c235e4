#include "arcube/dexterity.hpp"

#include "arcube/number_format.hpp"
#include "arcube/parallel.hpp"

#include <cmath>
#include <ostream>

namespace arcube {

double compensated_sum(const std::vector<double>& values) {
  double sum = 0.0;
  double compensation = 0.0;
  for (double value : values) {
    const double next = sum + value;
    if (std::abs(sum) >= std::abs(value)) compensation += (sum - next) + value;
    else compensation += (value - next) + sum;
    sum = next;
  }
  return sum + compensation;
}

namespace {

DexterityReport evaluate(const std::vector<TrajectoryPoint>& mechanism_points,
                         const std::vector<Eigen::Vector3d>& world_positions, const Design& design, unsigned threads) {
  if (mechanism_points.empty()) throw TrajectoryError("dexterity needs at least one trajectory point");

  DexterityReport report;
  report.rows.resize(mechanism_points.size());
  parallel_for(mechanism_points.size(), threads, [&](std::size_t i) {
    const auto& point = mechanism_points[i];
    const auto local = eta_local(point.pose, design);
    auto& row = report.rows[i];
    row.traj_id = point.traj_id;
    row.point_index = point.point_index;
    row.world_pose = point.pose;
    row.world_pose.position = world_positions[i];
    row.w_local = local.reachable ? 1 : 0;
    row.eta_local = local.eta;
    row.percent = local.reachable ? invert_percent(local.eta) : 0.0;
    row.dominating = local.dominating;
    row.failed_stage = local.failed_stage;
    row.failed_leg = local.failed_leg;
  });

  std::vector<double> finite;
  finite.reserve(report.rows.size());
  report.w_global = 1;
  for (const auto& row : report.rows) {
    report.w_global *= row.w_local;
    if (!row.w_local) ++report.unreachable_count;
    else if (std::isinf(row.eta_local)) ++report.singular_count;
    else finite.push_back(row.eta_local);
  }
  report.valid = report.unreachable_count == 0 && report.singular_count == 0;
  if (!finite.empty()) report.eta_global = compensated_sum(finite) / static_cast<double>(finite.size());
  else if (report.w_global == 1) report.eta_global = std::numeric_limits<double>::infinity();
  return report;
}

}  // namespace

DexterityReport eta_global(const std::vector<TrajectoryPoint>& mechanism_points, const Design& design, unsigned threads) {
  std::vector<Eigen::Vector3d> world;
  world.reserve(mechanism_points.size());
  for (const auto& point : mechanism_points) world.push_back(to_world(point.pose.position, design));
  return evaluate(mechanism_points, world, design, threads);
}

DexterityReport eta_global(const TrajectoryBundle& bundle, const Design& design, unsigned threads) {
  const auto points = world_points(bundle);
  std::vector<Eigen::Vector3d> world;
  world.reserve(points.size());
  for (const auto& point : points) world.push_back(point.pose.position);
  return evaluate(to_mechanism_frame(bundle, design), world, design, threads);
}

void write_dexterity_csv(std::ostream& out, const DexterityReport& report) {
  out << "traj_id,point_index,x,y,z,psi_deg,theta_deg,w_L,eta_L,dexterity_percent,dominating_block\n";
  for (const auto& row : report.rows) {
    out << row.traj_id << ',' << row.point_index;
    for (int k = 0; k < 3; ++k) out << ',' << format_double(row.world_pose.position(k));
    out << ',' << format_degrees(row.world_pose.psi) << ',' << format_degrees(row.world_pose.theta) << ','
        << row.w_local << ',';
    if (row.w_local) {
      out << (std::isinf(row.eta_local) ? std::string("inf") : format_double(row.eta_local)) << ','
          << format_double(row.percent) << ',' << block_name(row.dominating);
    } else {
      out << "nan,0,unreachable_" << stage_name(row.failed_stage) << '_' << leg_name(row.failed_leg);
    }
    out << '\n';
  }
}

}  // namespace arcube
