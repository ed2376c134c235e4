// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Tolerances and budgets are fixed here.
#include "arcube/design_io.hpp"
#include "arcube/dexterity.hpp"
#include "arcube/kinematics.hpp"
#include "arcube/optimizer.hpp"
#include "arcube/trajectory.hpp"
#include "arcube/validation.hpp"
#include "arcube/velocity.hpp"

#include "oracles.hpp"

#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace arcube;

namespace {

// AC1
constexpr int kIkPoses = 1000;
constexpr double kRoundTripTolerance = 1e-12;  // mm
constexpr double kTmsTolerance = 1e-9;         // mm^2
constexpr double kRtsTolerance = 1e-12;
constexpr double kIkBudget = 5.0;  // s
// AC2
constexpr int kGridPositions = 20;
constexpr int kGridAngles = 15;
constexpr double kGridBudget = 300.0;
// AC3
constexpr int kFdConfigurations = 100;
constexpr double kFdStep = 1e-6;
constexpr double kFdTolerance = 1e-5;
constexpr double kFdFloor = 1e-9;
constexpr int kPathSamples = 50;
constexpr double kPathTolerance = 1e-4;
constexpr double kJacobianBudget = 30.0;
// AC4
constexpr double kConditionTolerance = 1e-10;
constexpr double kPermutationTolerance = 1e-12;
// AC5
constexpr int kRandomDesigns = 1200;
constexpr double kGaBudget = 120.0;
// AC6
constexpr int kRegionGrid = 30;
constexpr int kValidationPoints = 100;
constexpr double kRegressionBudget = 60.0;

const std::string kCli = ARCUBE_CLI;
const std::string kSource = ARCUBE_SOURCE_DIR;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool passed = true;
  std::ostringstream detail;
  std::vector<std::string> failures;

  void require(bool condition, const std::string& failure) {
    if (condition) return;
    passed = false;
    failures.push_back(failure);
  }

  std::string summary() const {
    std::string text = detail.str();
    for (const auto& failure : failures) text += " [" + failure + "]";
    return text;
  }
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

int shell(const std::string& command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TaskPose<double> grid_pose(const Eigen::Vector3d& low, const Eigen::Vector3d& high, int i, int j, int k, double psi,
                           double theta, int n) {
  const auto at = [&](int axis, int index) { return low(axis) + (high(axis) - low(axis)) * index / (n - 1); };
  return {Eigen::Vector3d(at(0, i), at(1, j), at(2, k)), psi, theta};
}

// ---------------------------------------------------------------------------

Verdict ac1_ik_correctness() {
  Verdict verdict;
  const auto start = Clock::now();
  const Design design = design_from_table2();
  const Eigen::Vector3d center = to_mechanism(SyntheticRegion{}.center, design);
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> offset(-30.0, 30.0), azimuth(-M_PI, M_PI), tilt(0.0, deg_to_rad(40.0));

  int accepted = 0, attempts = 0, solutions = 0;
  double worst_roundtrip = 0.0, worst_tms = 0.0, worst_rts = 0.0;
  while (accepted < kIkPoses && attempts < 1000 * kIkPoses) {
    ++attempts;
    const TaskPose<double> pose{center + Eigen::Vector3d(offset(rng), offset(rng), offset(rng)), azimuth(rng), tilt(rng)};
    bool any = false;
    for (const auto& solution : solve_all_branches(pose, design)) {
      if (!solution.reachable) continue;
      any = true;
      ++solutions;
      worst_roundtrip =
          std::max(worst_roundtrip, (tls_fk(solution.joints.rho, design) - pose.position).cwiseAbs().maxCoeff());
      worst_tms = std::max(worst_tms, solution.tms_residual.cwiseAbs().maxCoeff());
      worst_rts = std::max(worst_rts, solution.rts_residual.cwiseAbs().maxCoeff());
    }
    accepted += any;
  }
  const double elapsed = seconds_since(start);
  verdict.require(accepted == kIkPoses, "only " + std::to_string(accepted) + " reachable poses found");
  verdict.require(worst_roundtrip < kRoundTripTolerance, "TLS round trip");
  verdict.require(worst_tms < kTmsTolerance, "four-bar residual");
  verdict.require(worst_rts < kRtsTolerance, "spherical residual");
  verdict.require(elapsed < kIkBudget, "runtime");
  verdict.detail << accepted << " poses, " << solutions << " branch solutions; worst round trip " << worst_roundtrip
                 << " mm (< " << kRoundTripTolerance << "), four-bar " << worst_tms << " mm^2 (< " << kTmsTolerance
                 << "), spherical " << worst_rts << " (< " << kRtsTolerance << "); " << elapsed << " s (< " << kIkBudget
                 << ")";
  return verdict;
}

Verdict ac2_branch_completeness() {
  Verdict verdict;
  const auto start = Clock::now();
  const Design design = design_from_table2();
  const oracle::Geometry geometry{design};
  const Eigen::Vector3d center = to_mechanism(SyntheticRegion{}.center, design);
  const Eigen::Vector3d low = center - Eigen::Vector3d(41.3, 37.7, 33.1);
  const Eigen::Vector3d high = center + Eigen::Vector3d(39.1, 43.9, 35.3);
  const double psi_low = deg_to_rad(-97.3), psi_high = deg_to_rad(101.1);
  const double theta_low = deg_to_rad(0.7), theta_high = deg_to_rad(52.9);

  long cells = 0, reachable = 0, disagreements = 0;
  for (int a = 0; a < kGridAngles; ++a) {
    for (int b = 0; b < kGridAngles; ++b) {
      const double psi = psi_low + (psi_high - psi_low) * a / (kGridAngles - 1);
      const double theta = theta_low + (theta_high - theta_low) * b / (kGridAngles - 1);
      const Eigen::Vector3d e = drill_axis(psi, theta);
      const std::array<std::vector<double>, 2> roots{geometry.spherical_roots(0, e), geometry.spherical_roots(1, e)};

      for (int i = 0; i < kGridPositions; ++i) {
        for (int j = 0; j < kGridPositions; ++j) {
          for (int k = 0; k < kGridPositions; ++k) {
            const auto pose = grid_pose(low, high, i, j, k, psi, theta, kGridPositions);
            ++cells;
            // Oracle: proximal joints from the TLS interval, then any
            // spherical root whose four-bar closes, per leg.
            bool expected = true;
            Eigen::Vector3d rho;
            for (int leg = 0; leg < 3 && expected; ++leg) {
              const double reach = pose.position(leg) + design.f(leg) + design.r;
              if (std::abs(reach) > design.p(leg)) expected = false;
              else rho(leg) = -std::asin(reach / design.p(leg));
            }
            for (int leg = 0; leg < 2 && expected; ++leg) {
              bool closes = false;
              for (double sigma : roots[static_cast<std::size_t>(leg)])
                closes = closes || geometry.four_bar_closes(leg, pose.position, rho(leg), sigma);
              expected = closes;
            }
            const bool actual = first_reachable(pose, design).reachable;
            reachable += actual;
            disagreements += actual != expected;
          }
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  verdict.require(disagreements == 0, std::to_string(disagreements) + " disagreeing cells");
  verdict.require(reachable > 0 && reachable < cells, "grid does not straddle the workspace boundary");
  verdict.require(elapsed < kGridBudget, "runtime");
  verdict.detail << cells << " cells, " << reachable << " reachable, " << disagreements << " disagreements; " << elapsed
                 << " s (< " << kGridBudget << ")";
  return verdict;
}

Verdict ac3_jacobian_fidelity() {
  Verdict verdict;
  const auto start = Clock::now();
  const Design design = design_from_table2();
  const oracle::Geometry geometry{design};

  std::array<double, 7> worst{};
  const auto samples = sample_configurations(design, 2024, kFdConfigurations);
  for (const auto& sample : samples) {
    const auto& joints = sample.solution.joints;
    const Eigen::Vector3d e = drill_axis(sample.pose);
    const auto set = jacobians(joints, sample.pose, design);
    const auto fd =
        oracle::numeric_blocks(geometry, joints.rho, joints.delta, joints.sigma, sample.pose.position, e, kFdStep);
    const std::array<double, 7> errors{
        oracle::relative_error(set.lv, fd.lv, kFdFloor),     oracle::relative_error(set.av, fd.av, kFdFloor),
        oracle::relative_error(set.sigma, fd.sigma, kFdFloor), oracle::relative_error(set.as, fd.as, kFdFloor),
        oracle::relative_error(set.ap, fd.ap, kFdFloor),     oracle::relative_error(set.rho, fd.rho, kFdFloor),
        oracle::relative_error(set.delta, fd.delta, kFdFloor)};
    for (std::size_t b = 0; b < 7; ++b) worst[b] = std::max(worst[b], errors[b]);
  }
  double worst_block = 0.0;
  for (std::size_t b = 0; b < 7; ++b) {
    verdict.require(worst[b] < kFdTolerance, std::string(block_name(kAllBlocks[b])) + " differs from finite differences");
    worst_block = std::max(worst_block, worst[b]);
  }

  // Smooth 5-DoF path through a sampled configuration; joint rates by central
  // differences of the IK along it, task rates by differences of the path.
  const auto anchor = samples.front();
  const auto path = [&](double s) {
    TaskPose<double> pose = anchor.pose;
    pose.position += Eigen::Vector3d(1.5 * std::sin(2 * M_PI * s), 1.2 * std::sin(4 * M_PI * s + 0.3),
                                     0.8 * std::cos(2 * M_PI * s) - 0.8);
    pose.psi += deg_to_rad(2.0) * std::sin(2 * M_PI * s + 1.0);
    pose.theta += deg_to_rad(1.5) * std::sin(2 * M_PI * s);
    return pose;
  };
  const double h = 1e-6;
  double worst_path = 0.0;
  int evaluated = 0;
  for (int n = 0; n < kPathSamples; ++n) {
    const double s = static_cast<double>(n) / kPathSamples;
    const auto pose = path(s), ahead_pose = path(s + h), behind_pose = path(s - h);
    const auto here = full_ik(pose, design, anchor.solution.branches);
    const auto ahead = full_ik(ahead_pose, design, anchor.solution.branches);
    const auto behind = full_ik(behind_pose, design, anchor.solution.branches);
    if (!here.reachable || !ahead.reachable || !behind.reachable) {
      verdict.require(false, "path leaves the reachable set at s = " + std::to_string(s));
      continue;
    }
    Eigen::Matrix<double, 5, 1> joint_rate;
    joint_rate.head<3>() = (ahead.joints.rho - behind.joints.rho) / (2 * h);
    for (int k = 0; k < 2; ++k)
      joint_rate(3 + k) = normalize_angle(ahead.joints.delta(k) - behind.joints.delta(k)) / (2 * h);
    const Eigen::Vector3d e = drill_axis(pose);
    const Eigen::Vector3d e_rate = (drill_axis(ahead_pose) - drill_axis(behind_pose)) / (2 * h);
    Eigen::Matrix<double, 6, 1> task_rate;
    task_rate << (ahead_pose.position - behind_pose.position) / (2 * h), e.cross(e_rate);

    const auto set = jacobians(here.joints, pose, design);
    const Eigen::Matrix<double, 5, 1> lhs = set.task_side * task_rate;
    const Eigen::Matrix<double, 5, 1> rhs = set.joint_side * joint_rate;
    worst_path = std::max(worst_path, oracle::relative_error(lhs, rhs, kFdFloor));
    ++evaluated;
  }
  verdict.require(worst_path < kPathTolerance, "assembled relation along the path");
  const double elapsed = seconds_since(start);
  verdict.require(elapsed < kJacobianBudget, "runtime");
  verdict.detail << samples.size() << " configurations, worst block error " << worst_block << " (< " << kFdTolerance
                 << "); path " << evaluated << " samples, worst " << worst_path << " (< " << kPathTolerance << "); "
                 << elapsed << " s (< " << kJacobianBudget << ")";
  return verdict;
}

Verdict ac4_dexterity_laws() {
  Verdict verdict;
  const Design design = design_from_table2();

  int configurations = 0;
  double worst_kappa = 0.0, lowest_eta = std::numeric_limits<double>::infinity();
  bool dominating_ok = true;
  auto check_solution = [&](const IkSolution<double>& solution, const TaskPose<double>& pose) {
    const auto local = eta_for_solution(solution, pose, design);
    const auto set = jacobians(solution.joints, pose, design);
    double expected = 0.0;
    Block expected_block = Block::LV;
    for (Block block : kAllBlocks) {
      const double kappa = oracle::condition(set.block(block));
      const double got = local.kappa[static_cast<std::size_t>(block)];
      worst_kappa = std::max(worst_kappa, std::abs(got - kappa) / kappa);
      if (kappa > expected) {
        expected = kappa;
        expected_block = block;
      }
    }
    worst_kappa = std::max(worst_kappa, std::abs(local.eta - expected) / expected);
    dominating_ok = dominating_ok && local.dominating == expected_block;
    lowest_eta = std::min(lowest_eta, local.eta);
    ++configurations;
  };
  for (const auto& sample : sample_configurations(design, 404, 200)) check_solution(sample.solution, sample.pose);
  auto points = to_mechanism_frame(synthetic_bundle(42, 6), design);
  for (const auto& point : points) {
    for (const auto& solution : solve_all_branches(point.pose, design))
      if (solution.reachable) check_solution(solution, point.pose);
  }
  verdict.require(lowest_eta >= 1.0, "eta_L below 1");
  verdict.require(worst_kappa < kConditionTolerance, "condition numbers differ from the SVD oracle");
  verdict.require(dominating_ok, "dominating block misidentified");

  const auto reference = eta_global(points, design, 1);
  double worst_permutation = 0.0;
  std::mt19937_64 rng(5);
  auto shuffled = points;
  for (int i = 0; i < 50; ++i) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto report = eta_global(shuffled, design, 1);
    worst_permutation = std::max(worst_permutation, std::abs(report.eta_global - reference.eta_global) / reference.eta_global);
  }
  verdict.require(reference.valid && worst_permutation <= kPermutationTolerance, "eta_G changes under permutation");

  bool product_ok = reference.w_global == 1;
  std::mt19937_64 pick(6);
  for (int injected = 1; injected <= 5; ++injected) {
    auto broken = points;
    std::vector<std::size_t> indices(broken.size());
    std::iota(indices.begin(), indices.end(), 0);
    std::shuffle(indices.begin(), indices.end(), pick);
    for (int n = 0; n < injected; ++n) broken[indices[static_cast<std::size_t>(n)]].pose.position.z() += 1e4;
    const auto report = eta_global(broken, design, 1);
    int product = 1;
    for (const auto& row : report.rows) product *= row.w_local;
    product_ok = product_ok && report.w_global == 0 && product == 0 &&
                 report.unreachable_count == static_cast<std::size_t>(injected) && !report.valid;
  }
  verdict.require(product_ok, "w_G does not follow the product of w_L");
  verdict.detail << configurations << " configurations; min eta_L " << lowest_eta << "; worst kappa deviation "
                 << worst_kappa << " (< " << kConditionTolerance << "); permutation drift " << worst_permutation
                 << " (<= " << kPermutationTolerance << "); w_G product holds under 1..5 injected failures";
  return verdict;
}

Verdict ac5_ga_desk_scale() {
  Verdict verdict;
  const auto start = Clock::now();
  const auto bundle = synthetic_bundle(42, 6);
  GaConfig config = desk_config();
  config.population = 40;
  config.generations = 30;
  config.seed = 42;

  const auto trace = evolve(config, bundle);
  bool monotone = true;
  for (std::size_t g = 1; g < trace.generations.size(); ++g)
    monotone = monotone && trace.generations[g].best <= trace.generations[g - 1].best;
  const auto random = random_search(config, bundle, kRandomDesigns);
  const auto rerun = evolve(config, bundle);
  std::ostringstream first_csv, second_csv;
  write_trace_csv(first_csv, trace);
  write_trace_csv(second_csv, rerun);
  const bool identical = first_csv.str() == second_csv.str() && trace.best.design == rerun.best.design;
  const double elapsed = seconds_since(start);

  verdict.require(trace.best.fitness.feasible, "final best is infeasible");
  verdict.require(monotone, "best fitness increased");
  verdict.require(trace.best.fitness.value <= random.fitness.value, "random search beat the GA");
  verdict.require(identical, "rerun differs");
  verdict.require(elapsed < kGaBudget, "runtime");
  verdict.detail << trace.generations.size() << " generations, best " << trace.best.fitness.value
                 << (trace.best.fitness.feasible ? " (w_G = 1)" : " (infeasible)") << " vs random " << kRandomDesigns
                 << " best " << random.fitness.value << "; monotone " << (monotone ? "yes" : "no")
                 << "; rerun bit-identical " << (identical ? "yes" : "no") << "; " << elapsed << " s (< " << kGaBudget
                 << ")";
  return verdict;
}

Verdict ac6_table2_regression() {
  Verdict verdict;
  const auto start = Clock::now();
  const fs::path shipped = fs::path(kSource) / "data" / "table2_design.json";
  const std::string bytes = slurp(shipped);
  const Design design = parse_design(bytes);
  verdict.require(design == design_from_table2(), "shipped design differs from the built-in values");
  verdict.require(dump_design(design) == bytes, "shipped design does not re-serialize byte for byte");

  const double psi = 0.0, theta = deg_to_rad(15.0);
  Eigen::Vector3d low, high;
  for (int k = 0; k < 3; ++k) {
    low(k) = -design.f(k) - design.r - design.p(k);
    high(k) = -design.f(k) - design.r + design.p(k);
  }
  long reachable = 0;
  for (int i = 0; i < kRegionGrid; ++i)
    for (int j = 0; j < kRegionGrid; ++j)
      for (int k = 0; k < kRegionGrid; ++k) reachable += reach_local(grid_pose(low, high, i, j, k, psi, theta, kRegionGrid), design);
  verdict.require(reachable > 0, "empty reachable region");

  const int code = shell("'" + kCli + "' validate --design '" + shipped.string() + "' --points " +
                         std::to_string(kValidationPoints) + " > /dev/null 2>&1");
  verdict.require(code == 0, "validate exited with " + std::to_string(code));
  const double elapsed = seconds_since(start);
  verdict.require(elapsed < kRegressionBudget, "runtime");
  verdict.detail << "lossless reload; " << reachable << " of " << kRegionGrid * kRegionGrid * kRegionGrid
                 << " grid cells reachable at psi 0, theta 15 deg; validate n = " << kValidationPoints << " exit " << code << "; "
                 << elapsed << " s (< " << kRegressionBudget << ")";
  return verdict;
}

Verdict ac7_determinism() {
  Verdict verdict;
  const auto start = Clock::now();
  const fs::path root = fs::temp_directory_path() / ("arcube_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string trajectories = (fs::path(kSource) / "data" / "example_trajectories.csv").string();
  const std::string config = (fs::path(kSource) / "presets" / "desk.json").string();

  // "auto" leaves ARCUBE_THREADS unset.
  const std::vector<std::pair<std::string, std::string>> runs{
      {"serial_a", "ARCUBE_THREADS=1"}, {"serial_b", "ARCUBE_THREADS=1"}, {"auto", "env -u ARCUBE_THREADS"},
      {"four", "ARCUBE_THREADS=4"}};
  for (const auto& [name, env] : runs) {
    const fs::path dir = root / name;
    const int profile = shell(env + " '" + kCli + "' profile --trajectories '" + trajectories + "' --out '" +
                              (dir / "profile").string() + "' > /dev/null 2>&1");
    const int optimize = shell(env + " '" + kCli + "' optimize --config '" + config + "' --seed 42 --trajectories '" +
                               trajectories + "' --out '" + (dir / "optimize").string() + "' > /dev/null 2>&1");
    verdict.require(profile == 0, name + " profile exited with " + std::to_string(profile));
    verdict.require(optimize == 0, name + " optimize exited with " + std::to_string(optimize));
  }

  // Manifests carry wall-clock time and absolute output paths; everything
  // else in them must agree.
  const auto stable_manifest = [](const fs::path& path) {
    auto json = nlohmann::json::parse(slurp(path));
    json.erase("wall_clock_seconds");
    for (auto& output : json["outputs"]) output = fs::path(output.get<std::string>()).filename().string();
    return json.dump();
  };
  const std::vector<std::string> files{"profile/profile.csv", "optimize/trace.csv", "optimize/best_design.json"};
  int compared = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    for (const auto& file : files) {
      const auto a = slurp(root / runs[0].first / file), b = slurp(root / runs[r].first / file);
      verdict.require(!a.empty() && a == b, file + " differs between " + runs[0].first + " and " + runs[r].first);
      ++compared;
    }
    for (const std::string manifest : {"profile/manifest.json", "optimize/manifest.json"}) {
      verdict.require(stable_manifest(root / runs[0].first / manifest) == stable_manifest(root / runs[r].first / manifest),
                      manifest + " differs between " + runs[0].first + " and " + runs[r].first);
      ++compared;
    }
  }
  fs::remove_all(root);
  verdict.detail << runs.size() << " runs (ARCUBE_THREADS = 1, 1, auto, 4), " << compared
                 << " output comparisons byte-identical; " << seconds_since(start) << " s";
  return verdict;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"AC1 IK correctness", ac1_ik_correctness},
      {"AC2 branch completeness", ac2_branch_completeness},
      {"AC3 Jacobian fidelity", ac3_jacobian_fidelity},
      {"AC4 dexterity index laws", ac4_dexterity_laws},
      {"AC5 GA at desk scale", ac5_ga_desk_scale},
      {"AC6 reference design regression", ac6_table2_regression},
      {"AC7 determinism", ac7_determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Verdict verdict;
    try {
      verdict = check();
    } catch (const std::exception& error) {
      verdict.passed = false;
      verdict.detail << "exception: " << error.what();
    }
    std::cout << (verdict.passed ? "PASS " : "FAIL ") << name << ": " << verdict.summary() << std::endl;
    failures += verdict.passed ? 0 : 1;
  }
  std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
