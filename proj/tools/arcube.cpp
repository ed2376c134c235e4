// arcube: batch front end for kinematics, dexterity profiling, numerical
// validation and GA synthesis of the AR-CUBE mechanism.
//
// Exit codes: 0 success, 1 usage/parse error, 2 infeasible or unreachable,
// 3 validation failure.
#include "arcube/design_io.hpp"
#include "arcube/dexterity.hpp"
#include "arcube/kinematics.hpp"
#include "arcube/number_format.hpp"
#include "arcube/optimizer.hpp"
#include "arcube/trajectory.hpp"
#include "arcube/validation.hpp"

#include "manifest.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace arcube;

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kInfeasible = 2, kValidationFailed = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Design read_design(const std::string& path, cli::RunManifest& manifest) {
  if (path.empty()) {
    manifest.add_preset("table2");
    return design_from_table2();
  }
  const std::string bytes = cli::read_file(path);
  manifest.add_input(path, bytes);
  return parse_design(bytes);
}

TrajectoryBundle read_bundle(const std::string& path, cli::RunManifest& manifest) {
  const std::string bytes = cli::read_file(path);
  manifest.add_input(path, bytes);
  std::istringstream in(bytes);
  return read_trajectory_csv(in);
}

TaskPose<double> parse_pose(const std::string& text) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string field;
  while (std::getline(stream, field, ',')) values.push_back(parse_double(field));
  if (values.size() != 5) throw UsageError("--pose needs x,y,z,psi_deg,theta_deg");
  TaskPose<double> pose;
  pose.position << values[0], values[1], values[2];
  pose.psi = deg_to_rad(values[3]);
  pose.theta = deg_to_rad(values[4]);
  return pose;
}

BranchFlags parse_branches(const std::string& text) {
  if (text.size() != 4) throw UsageError("--branches needs four signs, e.g. ++-+ (rts_x rts_y tms_x tms_y)");
  auto sign = [&](char c) {
    if (c == '+') return +1;
    if (c == '-') return -1;
    throw UsageError("--branches accepts only '+' and '-'");
  };
  return BranchFlags{{sign(text[0]), sign(text[1])}, {sign(text[2]), sign(text[3])}};
}

nlohmann::json degrees_array(const auto& radians) {
  auto array = nlohmann::json::array();
  for (int i = 0; i < radians.size(); ++i) array.push_back(rad_to_deg(radians(i)));
  return array;
}

std::string manifest_path(const std::string& out_dir) {
  return out_dir.empty() ? std::string() : (fs::path(out_dir) / "manifest.json").string();
}

void prepare_dir(const std::string& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

// ---------------------------------------------------------------------------

struct IkArgs {
  std::string design, pose, branches, out;
};

int run_ik(const IkArgs& args) {
  cli::RunManifest manifest("ik");
  const Design design = read_design(args.design, manifest);
  TaskPose<double> pose = parse_pose(args.pose);

  const auto solution =
      args.branches.empty() ? first_reachable(pose, design) : full_ik(pose, design, parse_branches(args.branches));

  nlohmann::json json;
  json["reachable"] = solution.reachable;
  json["branches"] = {{"rts", solution.branches.rts}, {"tms", solution.branches.tms}};
  if (solution.reachable) {
    json["joints"] = {{"rho_deg", degrees_array(solution.joints.rho)},
                      {"delta_deg", degrees_array(solution.joints.delta)},
                      {"sigma_deg", degrees_array(solution.joints.sigma)}};
    json["residuals"] = {{"tms_mm2", {solution.tms_residual(0), solution.tms_residual(1)}},
                         {"rts", {solution.rts_residual(0), solution.rts_residual(1)}}};
    const auto local = eta_for_solution(solution, pose, design);
    json["eta_local"] = std::isinf(local.eta) ? nlohmann::json("inf") : nlohmann::json(local.eta);
    json["dominating_block"] = block_name(local.dominating);
  } else {
    json["failed_stage"] = stage_name(solution.failed_stage);
    json["failed_leg"] = leg_name(solution.failed_leg);
  }
  std::cout << json.dump(2) << '\n';

  prepare_dir(args.out);
  manifest.emit(manifest_path(args.out));
  if (!solution.reachable) {
    std::cerr << "unreachable: " << stage_name(solution.failed_stage) << " leg " << leg_name(solution.failed_leg)
              << '\n';
    return kInfeasible;
  }
  return kOk;
}

struct ProfileArgs {
  std::string design, trajectories, out;
};

int run_profile(const ProfileArgs& args) {
  cli::RunManifest manifest("profile");
  const Design design = read_design(args.design, manifest);
  const TrajectoryBundle bundle = read_bundle(args.trajectories, manifest);
  const auto report = eta_global(bundle, design);

  prepare_dir(args.out);
  const std::string csv = (fs::path(args.out) / "profile.csv").string();
  {
    std::ofstream out(csv, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + csv + "'");
    write_dexterity_csv(out, report);
  }
  manifest.add_output(csv);
  manifest.emit(manifest_path(args.out));

  double low = 100.0, high = 0.0;
  for (const auto& row : report.rows) {
    if (!row.w_local) continue;
    low = std::min(low, row.percent);
    high = std::max(high, row.percent);
  }
  std::cout << "points " << report.rows.size() << ", w_G " << report.w_global << ", eta_G " << report.eta_global
            << (report.valid ? "" : " (partial)") << ", mean dexterity " << invert_percent(report.eta_global)
            << "%, local range " << low << "% to " << high << "%\n";
  if (report.unreachable_count > 0) {
    std::cerr << report.unreachable_count << " unreachable point(s)\n";
    return kInfeasible;
  }
  return kOk;
}

struct ValidateArgs {
  std::string design, out, fault;
  std::uint64_t seed = 1;
  int points = 100;
};

int run_validate(const ValidateArgs& args) {
  if (args.points < 1) throw UsageError("--points must be at least 1");
  ValidationOptions options;
  if (args.fault == "jlv-sign") options.corrupt_jlv_sign = true;
  else if (!args.fault.empty()) throw UsageError("unknown fault '" + args.fault + "'");

  cli::RunManifest manifest("validate");
  manifest.set_seed(args.seed);
  const Design design = read_design(args.design, manifest);
  const auto report = validate_design(design, args.seed, args.points, options);
  print_validation(std::cout, report);
  prepare_dir(args.out);
  manifest.emit(manifest_path(args.out));
  return report.passed ? kOk : kValidationFailed;
}

struct OptimizeArgs {
  std::string config, trajectories, out;
  std::optional<std::uint64_t> seed;
};

int run_optimize(const OptimizeArgs& args) {
  cli::RunManifest manifest("optimize");
  GaConfig config;
  if (args.config == "paper" || args.config == "desk") {
    manifest.add_preset(args.config);
    config = load_config(args.config);
  } else {
    const std::string bytes = cli::read_file(args.config);
    manifest.add_input(args.config, bytes);
    nlohmann::json json;
    try {
      json = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& error) {
      throw ConfigError(std::string("malformed GA config JSON: ") + error.what());
    }
    config = config_from_json(json);
  }
  if (args.seed) config.seed = *args.seed;
  manifest.set_seed(config.seed);
  const TrajectoryBundle bundle = read_bundle(args.trajectories, manifest);

  const GaTrace trace = evolve(config, bundle);

  prepare_dir(args.out);
  const std::string trace_path = (fs::path(args.out) / "trace.csv").string();
  const std::string best_path = (fs::path(args.out) / "best_design.json").string();
  {
    std::ofstream out(trace_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + trace_path + "'");
    write_trace_csv(out, trace);
  }
  save_design(best_path, trace.best.design);
  manifest.add_output(trace_path);
  manifest.add_output(best_path);
  manifest.emit(manifest_path(args.out));

  std::cout << "generations " << trace.generations.size() << (trace.converged ? " (converged)" : "")
            << ", evaluations " << trace.evaluations << ", best fitness " << trace.best.fitness.value
            << (trace.best.fitness.feasible ? " (feasible)" : " (infeasible)") << '\n';
  return trace.best.fitness.feasible ? kOk : kInfeasible;
}

struct SynthArgs {
  std::uint64_t seed = 42;
  int count = 6;
  int points = kDefaultPointsPerTrajectory;
  std::string out;
};

int run_synth(const SynthArgs& args) {
  cli::RunManifest manifest("synth");
  manifest.set_seed(args.seed);
  SyntheticRegion region;
  region.n_pts = args.points;
  const auto bundle = synthetic_bundle(args.seed, args.count, region);
  if (args.out.empty()) {
    write_trajectory_csv(std::cout, bundle);
    manifest.emit("");
  } else {
    save_trajectory_csv(args.out, bundle);
    manifest.add_output(args.out);
    manifest.emit(args.out + ".manifest.json");
  }
  return kOk;
}

int run_table2(const std::string& out) {
  cli::RunManifest manifest("table2");
  const Design design = design_from_table2();
  if (out.empty()) {
    std::cout << dump_design(design);
    manifest.emit("");
  } else {
    save_design(out, design);
    manifest.add_output(out);
    manifest.emit(out + ".manifest.json");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AR-CUBE mechanism kinematics, dexterity and dimensional synthesis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cli::kToolVersion);

  IkArgs ik;
  auto* ik_cmd = app.add_subcommand("ik", "Solve the inverse kinematics of one pose (R_m, degrees)");
  ik_cmd->add_option("--design", ik.design, "Design JSON (default: built-in reference design)");
  ik_cmd->add_option("--pose", ik.pose, "x,y,z,psi_deg,theta_deg; use --pose=... for negative values")->required();
  ik_cmd->add_option("--branches", ik.branches, "Fixed branch signs rts_x rts_y tms_x tms_y, e.g. ++-+");
  ik_cmd->add_option("--out", ik.out, "Directory for manifest.json");

  ProfileArgs profile;
  auto* profile_cmd = app.add_subcommand("profile", "Dexterity profile along drilling trajectories");
  profile_cmd->add_option("--design", profile.design, "Design JSON (default: built-in reference design)");
  profile_cmd->add_option("--trajectories", profile.trajectories, "Trajectory CSV")->required();
  profile_cmd->add_option("--out", profile.out, "Output directory (profile.csv, manifest.json)")->required();

  ValidateArgs validate;
  auto* validate_cmd = app.add_subcommand("validate", "Finite-difference and closure checks at sampled poses");
  validate_cmd->add_option("--design", validate.design, "Design JSON (default: built-in reference design)");
  validate_cmd->add_option("--seed", validate.seed, "Sampling seed");
  validate_cmd->add_option("--points", validate.points, "Number of configurations");
  validate_cmd->add_option("--out", validate.out, "Directory for manifest.json");
  validate_cmd->add_option("--inject-fault", validate.fault, "Debug: corrupt a block (jlv-sign)")->group("");

  OptimizeArgs optimize;
  std::uint64_t optimize_seed = 0;
  auto* optimize_cmd = app.add_subcommand("optimize", "Genetic-algorithm dimensional synthesis");
  optimize_cmd->add_option("--config", optimize.config, "GA config JSON, or preset 'paper' / 'desk'")->required();
  optimize_cmd->add_option("--trajectories", optimize.trajectories, "Trajectory CSV")->required();
  optimize_cmd->add_option("--out", optimize.out, "Output directory (trace.csv, best_design.json, manifest.json)")
      ->required();
  auto* seed_option = optimize_cmd->add_option("--seed", optimize_seed, "Override the config seed");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic pedicle-style trajectory CSV");
  synth_cmd->add_option("--seed", synth.seed, "Generator seed");
  synth_cmd->add_option("--count", synth.count, "Number of trajectories");
  synth_cmd->add_option("--points", synth.points, "Points per trajectory");
  synth_cmd->add_option("--out", synth.out, "Output CSV (default: stdout)");

  std::string table2_out;
  auto* table2_cmd = app.add_subcommand("table2", "Write the built-in reference design as JSON");
  table2_cmd->add_option("--out", table2_out, "Output JSON (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*ik_cmd) return run_ik(ik);
    if (*profile_cmd) return run_profile(profile);
    if (*validate_cmd) return run_validate(validate);
    if (*optimize_cmd) {
      if (*seed_option) optimize.seed = optimize_seed;
      return run_optimize(optimize);
    }
    if (*synth_cmd) return run_synth(synth);
    if (*table2_cmd) return run_table2(table2_out);
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
