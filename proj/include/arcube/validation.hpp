// Numerical self-checks of a design: kinematic round trips, closure
// residuals, and central-difference checks of every Jacobian block at
// randomly sampled reachable configurations.
#ifndef ARCUBE_VALIDATION_HPP
#define ARCUBE_VALIDATION_HPP

#include "arcube/core.hpp"
#include "arcube/kinematics.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace arcube {

struct ValidationOptions {
  double step = 1e-6;                // central-difference step, rad or mm
  double relative_tolerance = 1e-5;  // on block-normalized differences
  double absolute_floor = 1e-9;      // normalizer floor for near-zero blocks
  double roundtrip_tolerance = 1e-12;
  double tms_residual_tolerance = 1e-9;
  double rts_residual_tolerance = 1e-12;
  /// Negates the analytic J_LV before comparison (fault injection).
  bool corrupt_jlv_sign = false;
};

struct CheckResult {
  std::string name;
  double worst = 0.0;
  double tolerance = 0.0;
  int worst_configuration = -1;
  bool passed = true;
};

struct SampledConfiguration {
  TaskPose<double> pose;
  IkSolution<double> solution;
};

struct ValidationReport {
  std::vector<SampledConfiguration> configurations;
  std::vector<CheckResult> checks;
  bool passed = true;

  /// The failing check with the largest worst/tolerance ratio, or nullptr.
  const CheckResult* worst_offender() const;
};

/// Draws `count` reachable, nonsingular configurations: positions uniform in
/// the TLS box, drill axis within 40 degrees of z_m. Throws std::runtime_error
/// when the design reaches too few poses.
std::vector<SampledConfiguration> sample_configurations(const Design& design, std::uint64_t seed, int count);

/// Block-normalized difference max|a - b| / max(max|b|, floor).
template <typename A, typename B>
double normalized_difference(const Eigen::MatrixBase<A>& estimate, const Eigen::MatrixBase<B>& reference, double floor) {
  const double scale = std::max(reference.cwiseAbs().maxCoeff(), floor);
  return (estimate - reference).cwiseAbs().maxCoeff() / scale;
}

ValidationReport validate_design(const Design& design, std::uint64_t seed, int count,
                                 const ValidationOptions& options = {});

void print_validation(std::ostream& out, const ValidationReport& report);

}  // namespace arcube

#endif  // ARCUBE_VALIDATION_HPP
