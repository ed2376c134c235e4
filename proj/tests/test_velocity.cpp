#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "arcube/kinematics.hpp"
#include "arcube/validation.hpp"
#include "arcube/velocity.hpp"

#include "oracles.hpp"

#include <random>

using namespace arcube;

namespace {

using oracle::Geometry;
using oracle::relative_error;

constexpr double kStep = 1e-6;

}  // namespace

TEST_CASE("every block matches central differences of the point geometry") {
  const Design design = design_from_table2();
  const Geometry geometry{design};
  const auto samples = sample_configurations(design, 4, 100);
  REQUIRE(samples.size() == 100);

  double worst = 0.0;
  for (const auto& sample : samples) {
    const auto& joints = sample.solution.joints;
    const auto& pose = sample.pose;
    const Eigen::Vector3d e = drill_axis(pose);
    const auto set = jacobians(joints, pose, design);
    REQUIRE_FALSE(set.singular.has_value());

    const auto fd = oracle::numeric_blocks(geometry, joints.rho, joints.delta, joints.sigma, pose.position, e, kStep);
    const double errors[] = {relative_error(set.lv, fd.lv),       relative_error(set.rho, fd.rho),
                             relative_error(set.delta, fd.delta), relative_error(set.sigma, fd.sigma),
                             relative_error(set.av, fd.av),       relative_error(set.as, fd.as),
                             relative_error(set.ap, fd.ap)};
    for (double error : errors) {
      CHECK(error < 1e-5);
      worst = std::max(worst, error);
    }
  }
  MESSAGE("worst block error " << worst);
}

TEST_CASE("J_AP rows are perpendicular to the drill axis") {
  const Design design = design_from_table2();
  for (const auto& sample : sample_configurations(design, 6, 50)) {
    const auto set = jacobians(sample.solution.joints, sample.pose, design);
    const Eigen::Vector3d e = drill_axis(sample.pose);
    CHECK(std::abs(set.ap.row(0).dot(e)) < 1e-14);
    CHECK(std::abs(set.ap.row(1).dot(e)) < 1e-14);
  }
}

TEST_CASE("inverse velocity is linear in the task rate") {
  const Design design = design_from_table2();
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const auto& sample : sample_configurations(design, 8, 30)) {
    auto random_rate = [&] {
      TaskRate<double> rate;
      rate.linear = Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
      rate.psi_dot = normal(rng);
      rate.theta_dot = normal(rng);
      return rate;
    };
    const auto r1 = random_rate(), r2 = random_rate();
    TaskRate<double> mix;
    mix.linear = 2.0 * r1.linear - 0.5 * r2.linear;
    mix.psi_dot = 2.0 * r1.psi_dot - 0.5 * r2.psi_dot;
    mix.theta_dot = 2.0 * r1.theta_dot - 0.5 * r2.theta_dot;
    const auto q1 = inverse_velocity(r1, sample.solution.joints, sample.pose, design);
    const auto q2 = inverse_velocity(r2, sample.solution.joints, sample.pose, design);
    const auto qm = inverse_velocity(mix, sample.solution.joints, sample.pose, design);
    const double scale = 1.0 + qm.rho_dot.norm() + qm.delta_dot.norm();
    CHECK((qm.rho_dot - (2.0 * q1.rho_dot - 0.5 * q2.rho_dot)).norm() < 1e-10 * scale);
    CHECK((qm.delta_dot - (2.0 * q1.delta_dot - 0.5 * q2.delta_dot)).norm() < 1e-10 * scale);
  }
}

TEST_CASE("pure translation drives rho through J_LV and leaves sigma still") {
  const Design design = design_from_table2();
  const auto sample = sample_configurations(design, 10, 1).front();
  TaskRate<double> rate;
  rate.linear = Eigen::Vector3d(1.0, -2.0, 0.5);
  const auto rates = inverse_velocity(rate, sample.solution.joints, sample.pose, design);
  for (int k = 0; k < 3; ++k) {
    const double expected = rate.linear(k) / (-design.p(k) * std::cos(sample.solution.joints.rho(k)));
    CHECK(rates.rho_dot(k) == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(rates.sigma_dot.norm() == 0.0);
}

TEST_CASE("joint rates match finite differences of the IK along a path") {
  const Design design = design_from_table2();
  for (const auto& sample : sample_configurations(design, 12, 20)) {
    TaskRate<double> rate;
    rate.linear = Eigen::Vector3d(0.3, -0.7, 0.4);
    rate.psi_dot = 0.2;
    rate.theta_dot = -0.1;
    auto pose_at = [&](double time) {
      TaskPose<double> pose = sample.pose;
      pose.position += time * rate.linear;
      pose.psi += time * rate.psi_dot;
      pose.theta += time * rate.theta_dot;
      return pose;
    };
    const double h = 1e-6;
    const auto ahead = full_ik(pose_at(h), design, sample.solution.branches);
    const auto behind = full_ik(pose_at(-h), design, sample.solution.branches);
    REQUIRE(ahead.reachable);
    REQUIRE(behind.reachable);
    const auto analytic = inverse_velocity(rate, sample.solution.joints, sample.pose, design);
    const Eigen::Vector3d rho_fd = (ahead.joints.rho - behind.joints.rho) / (2 * h);
    Eigen::Vector2d delta_fd, sigma_fd;
    for (int k = 0; k < 2; ++k) {
      delta_fd(k) = normalize_angle(ahead.joints.delta(k) - behind.joints.delta(k)) / (2 * h);
      sigma_fd(k) = normalize_angle(ahead.joints.sigma(k) - behind.joints.sigma(k)) / (2 * h);
    }
    CHECK(relative_error(analytic.rho_dot, rho_fd) < 1e-5);
    CHECK(relative_error(analytic.delta_dot, delta_fd) < 1e-4);
    CHECK(relative_error(analytic.sigma_dot, sigma_fd) < 1e-5);
  }
}

TEST_CASE("parallelogram four-bar transmits sigma to delta one to one") {
  Design design = design_from_table2();
  design.t = design.d.head<2>();
  const Geometry geometry{design};
  const Eigen::Vector3d rho(-0.3, 0.2, -0.4);
  const Eigen::Vector3d position = geometry.tip(rho);
  for (int k = 0; k < 2; ++k) {
    const int v_axis = (k + 1) % 3, w_axis = (k + 2) % 3;
    design.c(k) = std::hypot(position(v_axis), position(w_axis) + design.o(k) - design.p(k) * std::cos(rho(k)));
  }
  const TaskPose<double> pose{position, 0.1, 0.3};
  bool checked = false;
  for (const auto& flags : all_branch_flags()) {
    const auto solution = full_ik(pose, design, flags);
    if (!solution.reachable) continue;
    if (std::abs(normalize_angle(solution.joints.delta(0) - solution.joints.sigma(0))) > 1e-9) continue;
    if (std::abs(normalize_angle(solution.joints.delta(1) - solution.joints.sigma(1))) > 1e-9) continue;
    TaskRate<double> rate;
    rate.psi_dot = 0.4;
    rate.theta_dot = 0.25;
    const auto rates = inverse_velocity(rate, solution.joints, pose, design);
    CHECK(rates.rho_dot.norm() < 1e-14);
    for (int k = 0; k < 2; ++k) {
      REQUIRE(std::abs(rates.sigma_dot(k)) > 1e-6);
      CHECK(rates.delta_dot(k) / rates.sigma_dot(k) == doctest::Approx(1.0).epsilon(1e-9));
    }
    checked = true;
  }
  CHECK(checked);
}

TEST_CASE("singular configurations are named") {
  const Design design = design_from_table2();
  const auto sample = sample_configurations(design, 14, 1).front();
  TaskRate<double> rate;

  TaskPose<double> pole = sample.pose;
  pole.theta = 0.0;
  CHECK_THROWS_WITH_AS(inverse_velocity(rate, sample.solution.joints, pole, design), doctest::Contains("theta"),
                       SingularityError);

  JointState<double> stretched = sample.solution.joints;
  stretched.rho(2) = M_PI / 2;
  try {
    inverse_velocity(rate, stretched, sample.pose, design);
    FAIL("expected a singularity");
  } catch (const SingularityError& error) {
    CHECK(error.block() == "J_LV");
  }
}
