// Genetic-algorithm dimensional synthesis over the 23-parameter design space:
// minimize eta_G subject to every trajectory point being reachable.
#ifndef ARCUBE_OPTIMIZER_HPP
#define ARCUBE_OPTIMIZER_HPP

#include "arcube/core.hpp"
#include "arcube/kinematics.hpp"
#include "arcube/trajectory.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace arcube {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Feasible fitness is eta_G capped here; every infeasible value lies above.
inline constexpr double kFeasibleCap = 1e6;
inline constexpr double kPenaltyBase = 1e7;
inline constexpr double kPenaltySlope = 1e7;

/// Per-parameter box, flat layout of DesignVector (angles in radians).
struct ParameterBounds {
  Design::Flat lower;
  Design::Flat upper;

  Design::Flat clamp(const Design::Flat& values) const { return values.cwiseMax(lower).cwiseMin(upper); }
  /// Clamps, then moves angles onto values that a degree-valued design file
  /// reproduces exactly. Angle bounds are expected on that grid already.
  Design::Flat project(const Design::Flat& values) const;
  bool contains(const Design::Flat& values) const {
    return (values.array() >= lower.array()).all() && (values.array() <= upper.array()).all();
  }
};

/// Lengths f, p, d, c, t in [10, 300] mm; r in [20, 150] mm; o in
/// [-100, 100] mm; m in [-300, 300] mm; alpha, beta in [20, 120] degrees.
ParameterBounds default_bounds();

struct GaConfig {
  int population = 400;
  int generations = 300;
  double convergence = 1e-5;
  int patience = 20;
  double crossover_rate = 0.9;
  double mutation_rate = 1.0 / Design::kSize;
  double mutation_scale = 0.05;  // fraction of each parameter's range
  int elite = 2;
  int tournament = 3;
  double blend_alpha = 0.5;
  std::uint64_t seed = 1;
  ParameterBounds bounds = default_bounds();
};

/// Throws ConfigError naming the first invalid field.
void validate(const GaConfig& config);

/// Population 400, 300 generations, 1e-5 convergence.
GaConfig paper_config();
/// Population 40, 30 generations, seed 7.
GaConfig desk_config();

/// JSON keys mirror the field names; "bounds" maps parameter names to
/// [lower, upper] pairs with angles in degrees. Missing keys keep defaults.
GaConfig config_from_json(const nlohmann::json& json);
nlohmann::json config_to_json(const GaConfig& config);
/// A path to a JSON file, or one of the preset names "paper" and "desk".
GaConfig load_config(const std::string& path_or_preset);

struct Fitness {
  double value = 0.0;
  bool feasible = false;
  double eta_global = 0.0;          // mean eta_L of the evaluated points
  std::size_t unreachable = 0;      // unreachable or singular points
  std::size_t points = 0;
  std::array<std::size_t, 4> failed_stage_histogram{};  // indexed by Stage
};

/// eta_G when every point is reachable and non-singular; otherwise
/// kPenaltyBase + (failed fraction) * kPenaltySlope.
Fitness fitness(const Design& design, const TrajectoryBundle& bundle);

struct Candidate {
  Design design;
  Fitness fitness;
};

struct GenerationStats {
  int generation = 0;
  double best = 0.0;
  double mean = 0.0;
  double feasible_fraction = 0.0;
};

struct GaTrace {
  std::vector<GenerationStats> generations;
  Candidate best;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Generator for one candidate slot; depends only on (seed, generation, index).
std::mt19937_64 candidate_stream(std::uint64_t seed, std::uint64_t generation, std::uint64_t index);

/// Uniform sample inside the bounds.
Design random_design(std::mt19937_64& rng, const ParameterBounds& bounds);

/// Generational GA: tournament selection, blend crossover, bounded Gaussian
/// mutation, elitism. Fitness evaluations are spread over `threads` workers
/// (0 = ARCUBE_THREADS default) without affecting the result.
GaTrace evolve(const GaConfig& config, const TrajectoryBundle& bundle, unsigned threads = 0);

/// Best of `count` uniform designs drawn from candidate_stream(seed, 0, i).
Candidate random_search(const GaConfig& config, const TrajectoryBundle& bundle, int count, unsigned threads = 0);

/// generation,best,mean,feasible_fraction
void write_trace_csv(std::ostream& out, const GaTrace& trace);

}  // namespace arcube

#endif  // ARCUBE_OPTIMIZER_HPP
