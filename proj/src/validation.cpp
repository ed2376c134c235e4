#include "arcube/validation.hpp"

#include "arcube/velocity.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <stdexcept>

namespace arcube {

namespace {

constexpr double kSampleMargin = 1e-3;

bool well_conditioned(const SampledConfiguration& sample, const Design& design) {
  const auto set = jacobians(sample.solution.joints, sample.pose, design);
  if (set.singular) return false;
  for (int k = 0; k < 3; ++k)
    if (std::abs(std::cos(sample.solution.joints.rho(k))) < kSampleMargin) return false;
  for (int k = 0; k < 2; ++k)
    if (std::abs(set.as(k, k)) < kSampleMargin) return false;
  return true;
}

// Half of the four-bar residual, as a function of every variable it touches.
struct TmsResidual {
  const Design& design;
  Leg leg;
  double operator()(const Eigen::Vector3d& position, double rho, double delta, double sigma) const {
    return 0.5 * tms_residual(delta, sigma, position, rho, design, leg);
  }
};

class Checker {
 public:
  Checker(std::string name, double tolerance) {
    result_.name = std::move(name);
    result_.tolerance = tolerance;
  }
  void record(double error, int configuration) {
    if (result_.worst_configuration < 0 || !(error <= result_.worst)) {
      result_.worst = error;
      result_.worst_configuration = configuration;
    }
    if (!(error < result_.tolerance)) result_.passed = false;
  }
  CheckResult result() const { return result_; }

 private:
  CheckResult result_;
};

}  // namespace

const CheckResult* ValidationReport::worst_offender() const {
  const CheckResult* worst = nullptr;
  for (const auto& check : checks) {
    if (check.passed) continue;
    if (!worst || check.worst / check.tolerance > worst->worst / worst->tolerance) worst = &check;
  }
  return worst;
}

std::vector<SampledConfiguration> sample_configurations(const Design& design, std::uint64_t seed, int count) {
  std::seed_seq sequence{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x56414cu};
  std::mt19937_64 rng(sequence);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const Eigen::Vector3d center = -(design.f.array() + design.r).matrix();
  const Eigen::Vector3d half = 0.99 * design.p;
  const double max_theta = deg_to_rad(40.0);

  std::vector<SampledConfiguration> samples;
  const long long budget = 5000LL * std::max(count, 1);
  for (long long attempt = 0; attempt < budget && static_cast<int>(samples.size()) < count; ++attempt) {
    SampledConfiguration sample;
    for (int k = 0; k < 3; ++k) sample.pose.position(k) = center(k) + (2.0 * unit(rng) - 1.0) * half(k);
    sample.pose.psi = std::numbers::pi * (2.0 * unit(rng) - 1.0);
    sample.pose.theta = max_theta * unit(rng);
    sample.solution = first_reachable(sample.pose, design);
    if (sample.solution.reachable && well_conditioned(sample, design)) samples.push_back(sample);
  }
  if (static_cast<int>(samples.size()) < count)
    throw std::runtime_error("design reaches too few sampled poses (" + std::to_string(samples.size()) + " of " +
                             std::to_string(count) + ")");
  return samples;
}

ValidationReport validate_design(const Design& design, std::uint64_t seed, int count, const ValidationOptions& options) {
  if (count < 1) throw std::invalid_argument("validation needs at least one configuration");
  ValidationReport report;
  report.configurations = sample_configurations(design, seed, count);

  const double h = options.step;
  Checker roundtrip("tls_roundtrip", options.roundtrip_tolerance);
  Checker tms_closure_check("tms_closure_residual", options.tms_residual_tolerance);
  Checker rts_closure_check("rts_closure_residual", options.rts_residual_tolerance);
  Checker lv("J_LV", options.relative_tolerance);
  Checker rho("J_rho", options.relative_tolerance);
  Checker delta("J_delta", options.relative_tolerance);
  Checker av("J_AV", options.relative_tolerance);
  Checker sigma("J_sigma", options.relative_tolerance);
  Checker as("J_AS", options.relative_tolerance);
  Checker ap("J_AP", options.relative_tolerance);
  Checker implicit("rts_implicit_rate", options.relative_tolerance);

  for (int index = 0; index < static_cast<int>(report.configurations.size()); ++index) {
    const auto& sample = report.configurations[static_cast<std::size_t>(index)];
    const auto& joints = sample.solution.joints;
    const auto& position = sample.pose.position;
    const Eigen::Vector3d e = drill_axis(sample.pose);
    auto set = jacobians(joints, sample.pose, design);
    if (options.corrupt_jlv_sign) set.lv = -set.lv;

    const Eigen::Vector3d back = tls_fk(tls_ik(position, design).rho, design);
    roundtrip.record((back - position).cwiseAbs().maxCoeff(), index);
    tms_closure_check.record(sample.solution.tms_residual.cwiseAbs().maxCoeff(), index);
    rts_closure_check.record(sample.solution.rts_residual.cwiseAbs().maxCoeff(), index);

    Eigen::Matrix3d lv_fd = Eigen::Matrix3d::Zero();
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d up = joints.rho, down = joints.rho;
      up(k) += h;
      down(k) -= h;
      lv_fd.col(k) = (tls_fk(up, design) - tls_fk(down, design)) / (2.0 * h);
    }
    lv.record(normalized_difference(lv_fd, set.lv, options.absolute_floor), index);

    Eigen::Matrix2d rho_fd = Eigen::Matrix2d::Zero(), delta_fd = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d sigma_fd = Eigen::Matrix2d::Zero(), as_fd = Eigen::Matrix2d::Zero();
    Eigen::Matrix<double, 2, 3> av_fd = Eigen::Matrix<double, 2, 3>::Zero();
    Eigen::Matrix<double, 2, 3> ap_fd = Eigen::Matrix<double, 2, 3>::Zero();
    Eigen::Matrix2d implicit_fd, implicit_an;
    for (Leg leg : kAngularLegs) {
      const int k = index_of(leg);
      const TmsResidual phi{design, leg};
      const double r = joints.rho(k), d = joints.delta(k), s = joints.sigma(k);
      rho_fd(k, k) = (phi(position, r + h, d, s) - phi(position, r - h, d, s)) / (2.0 * h);
      delta_fd(k, k) = (phi(position, r, d + h, s) - phi(position, r, d - h, s)) / (2.0 * h);
      sigma_fd(k, k) = -(phi(position, r, d, s + h) - phi(position, r, d, s - h)) / (2.0 * h);
      for (int j = 0; j < 3; ++j) {
        Eigen::Vector3d up = position, down = position;
        up(j) += h;
        down(j) -= h;
        av_fd(k, j) = -(phi(up, r, d, s) - phi(down, r, d, s)) / (2.0 * h);
      }
      as_fd(k, k) = (rts_residual(s + h, e, design, leg) - rts_residual(s - h, e, design, leg)) / (2.0 * h);
      for (int j = 0; j < 3; ++j) {
        const Eigen::Vector3d up = Eigen::AngleAxisd(h, Eigen::Vector3d::Unit(j)) * e;
        const Eigen::Vector3d down = Eigen::AngleAxisd(-h, Eigen::Vector3d::Unit(j)) * e;
        ap_fd(k, j) = -(rts_residual(s, up, design, leg) - rts_residual(s, down, design, leg)) / (2.0 * h);
      }
      // d sigma / d(psi, theta) by re-solving the spherical closure on the same branch.
      const int branch = sample.solution.branches.rts[static_cast<std::size_t>(k)];
      auto solve_sigma = [&](double psi, double theta) {
        return solve_trig(rts_closure(psi, theta, design, leg), branch).angle;
      };
      implicit_fd(k, 0) = normalize_angle(solve_sigma(sample.pose.psi + h, sample.pose.theta) -
                                          solve_sigma(sample.pose.psi - h, sample.pose.theta)) / (2.0 * h);
      implicit_fd(k, 1) = normalize_angle(solve_sigma(sample.pose.psi, sample.pose.theta + h) -
                                          solve_sigma(sample.pose.psi, sample.pose.theta - h)) / (2.0 * h);
    }
    const Eigen::Matrix<double, 3, 2> partials = drill_axis_partials(sample.pose.psi, sample.pose.theta);
    Eigen::Matrix<double, 3, 2> omega_columns;
    for (int j = 0; j < 2; ++j) omega_columns.col(j) = e.cross(partials.col(j));
    implicit_an = set.as.inverse() * set.ap * omega_columns;

    rho.record(normalized_difference(rho_fd, set.rho, options.absolute_floor), index);
    delta.record(normalized_difference(delta_fd, set.delta, options.absolute_floor), index);
    sigma.record(normalized_difference(sigma_fd, set.sigma, options.absolute_floor), index);
    av.record(normalized_difference(av_fd, set.av, options.absolute_floor), index);
    as.record(normalized_difference(as_fd, set.as, options.absolute_floor), index);
    ap.record(normalized_difference(ap_fd, set.ap, options.absolute_floor), index);
    implicit.record(normalized_difference(implicit_fd, implicit_an, options.absolute_floor), index);
  }

  for (const auto* checker : {&roundtrip, &tms_closure_check, &rts_closure_check, &lv, &av, &sigma, &as, &ap, &rho,
                              &delta, &implicit}) {
    report.checks.push_back(checker->result());
    if (!report.checks.back().passed) report.passed = false;
  }
  return report;
}

void print_validation(std::ostream& out, const ValidationReport& report) {
  out << "validated " << report.configurations.size() << " configurations\n";
  for (const auto& check : report.checks) {
    out << (check.passed ? "  PASS " : "  FAIL ") << std::left << std::setw(22) << check.name << " worst "
        << std::scientific << std::setprecision(3) << check.worst << " (tolerance " << check.tolerance << ")";
    if (!check.passed) out << " at configuration " << check.worst_configuration;
    out << std::defaultfloat << '\n';
  }
  if (const auto* worst = report.worst_offender())
    out << "worst offender: " << worst->name << " at configuration " << worst->worst_configuration << '\n';
  out << (report.passed ? "all checks passed\n" : "validation FAILED\n");
}

}  // namespace arcube
