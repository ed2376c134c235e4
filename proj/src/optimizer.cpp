#include "arcube/optimizer.hpp"

#include "arcube/dexterity.hpp"
#include "arcube/kinematics.hpp"
#include "arcube/number_format.hpp"
#include "arcube/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace arcube {

ParameterBounds default_bounds() {
  ParameterBounds bounds;
  auto set = [&](int first, int count, double lower, double upper) {
    bounds.lower.segment(first, count).setConstant(lower);
    bounds.upper.segment(first, count).setConstant(upper);
  };
  set(0, 3, -300.0, 300.0);                                // m
  set(3, 13, 10.0, 300.0);                                 // f, p, d, c, t
  set(16, 1, 20.0, 150.0);                                 // r
  set(17, 2, -100.0, 100.0);                               // o
  set(19, 4, deg_to_rad(20.0), deg_to_rad(120.0));         // alpha, beta
  return bounds;
}

Design::Flat ParameterBounds::project(const Design::Flat& values) const {
  Design::Flat projected = clamp(values);
  for (int i = 0; i < Design::kSize; ++i)
    if (is_angle_parameter(i)) projected(i) = snap_to_degree_grid(projected(i));
  return clamp(projected);
}

void validate(const GaConfig& config) {
  auto fail = [](const std::string& message) { throw ConfigError("invalid GA config: " + message); };
  if (config.population < 2) fail("population must be at least 2");
  if (config.generations < 1) fail("generations must be at least 1");
  if (!(config.convergence >= 0.0)) fail("convergence must be non-negative");
  if (config.patience < 1) fail("patience must be at least 1");
  if (!(config.crossover_rate >= 0.0 && config.crossover_rate <= 1.0)) fail("crossover_rate must lie in [0, 1]");
  if (!(config.mutation_rate >= 0.0 && config.mutation_rate <= 1.0)) fail("mutation_rate must lie in [0, 1]");
  if (!(config.mutation_scale >= 0.0)) fail("mutation_scale must be non-negative");
  if (config.elite < 1 || config.elite >= config.population) fail("elite must lie in [1, population)");
  if (config.tournament < 1) fail("tournament must be at least 1");
  if (!(config.blend_alpha >= 0.0)) fail("blend_alpha must be non-negative");
  const auto& names = parameter_names();
  for (int i = 0; i < Design::kSize; ++i) {
    if (!(config.bounds.lower(i) < config.bounds.upper(i)))
      fail("bounds for " + std::string(names[static_cast<std::size_t>(i)]) + " need lower < upper");
  }
  // Candidates sampled inside the bounds must be valid designs.
  const double pi = std::numbers::pi;
  for (int i = 3; i < Design::kSize; ++i) {
    if (i == 17 || i == 18) continue;
    const bool ok = is_angle_parameter(i) ? (config.bounds.lower(i) > 0.0 && config.bounds.upper(i) < pi)
                                          : config.bounds.lower(i) > 0.0;
    if (!ok) fail("bounds for " + std::string(names[static_cast<std::size_t>(i)]) + " admit invalid designs");
  }
}

GaConfig paper_config() { return GaConfig{}; }

GaConfig desk_config() {
  GaConfig config;
  config.population = 40;
  config.generations = 30;
  config.seed = 7;
  return config;
}

GaConfig config_from_json(const nlohmann::json& json) {
  if (!json.is_object()) throw ConfigError("GA config must be a JSON object");
  GaConfig config;
  static const std::array<std::string_view, 12> known{"population", "generations", "convergence", "patience",
                                                      "crossover_rate", "mutation_rate", "mutation_scale",
                                                      "elite", "tournament", "blend_alpha", "seed", "bounds"};
  for (const auto& item : json.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end())
      throw ConfigError("unknown GA config key \"" + item.key() + "\"");
  }
  try {
    if (json.contains("population")) config.population = json.at("population").get<int>();
    if (json.contains("generations")) config.generations = json.at("generations").get<int>();
    if (json.contains("convergence")) config.convergence = json.at("convergence").get<double>();
    if (json.contains("patience")) config.patience = json.at("patience").get<int>();
    if (json.contains("crossover_rate")) config.crossover_rate = json.at("crossover_rate").get<double>();
    if (json.contains("mutation_rate")) config.mutation_rate = json.at("mutation_rate").get<double>();
    if (json.contains("mutation_scale")) config.mutation_scale = json.at("mutation_scale").get<double>();
    if (json.contains("elite")) config.elite = json.at("elite").get<int>();
    if (json.contains("tournament")) config.tournament = json.at("tournament").get<int>();
    if (json.contains("blend_alpha")) config.blend_alpha = json.at("blend_alpha").get<double>();
    if (json.contains("seed")) config.seed = json.at("seed").get<std::uint64_t>();
    if (json.contains("bounds")) {
      const auto& names = parameter_names();
      for (const auto& item : json.at("bounds").items()) {
        const auto it = std::find(names.begin(), names.end(), item.key());
        if (it == names.end()) throw ConfigError("unknown bounds parameter \"" + item.key() + "\"");
        const int i = static_cast<int>(it - names.begin());
        const auto& pair = item.value();
        if (!pair.is_array() || pair.size() != 2) throw ConfigError("bounds for \"" + item.key() + "\" need [lower, upper]");
        double lower = pair[0].get<double>(), upper = pair[1].get<double>();
        if (is_angle_parameter(i)) {
          lower = deg_to_rad(lower);
          upper = deg_to_rad(upper);
        }
        config.bounds.lower(i) = lower;
        config.bounds.upper(i) = upper;
      }
    }
  } catch (const nlohmann::json::exception& error) {
    throw ConfigError(std::string("GA config: ") + error.what());
  }
  validate(config);
  return config;
}

nlohmann::json config_to_json(const GaConfig& config) {
  nlohmann::json json;
  json["population"] = config.population;
  json["generations"] = config.generations;
  json["convergence"] = config.convergence;
  json["patience"] = config.patience;
  json["crossover_rate"] = config.crossover_rate;
  json["mutation_rate"] = config.mutation_rate;
  json["mutation_scale"] = config.mutation_scale;
  json["elite"] = config.elite;
  json["tournament"] = config.tournament;
  json["blend_alpha"] = config.blend_alpha;
  json["seed"] = config.seed;
  nlohmann::json bounds = nlohmann::json::object();
  const auto& names = parameter_names();
  for (int i = 0; i < Design::kSize; ++i) {
    double lower = config.bounds.lower(i), upper = config.bounds.upper(i);
    if (is_angle_parameter(i)) {
      lower = canonical_degrees(lower);
      upper = canonical_degrees(upper);
    }
    bounds[std::string(names[static_cast<std::size_t>(i)])] = {lower, upper};
  }
  json["bounds"] = bounds;
  return json;
}

GaConfig load_config(const std::string& path_or_preset) {
  if (path_or_preset == "paper") return paper_config();
  if (path_or_preset == "desk") return desk_config();
  std::ifstream in(path_or_preset, std::ios::binary);
  if (!in) throw ConfigError("cannot open GA config '" + path_or_preset + "'");
  std::ostringstream text;
  text << in.rdbuf();
  nlohmann::json json;
  try {
    json = nlohmann::json::parse(text.str());
  } catch (const nlohmann::json::parse_error& error) {
    throw ConfigError(std::string("malformed GA config JSON: ") + error.what());
  }
  return config_from_json(json);
}

Fitness fitness(const Design& design, const TrajectoryBundle& bundle) {
  const auto points = to_mechanism_frame(bundle, design);
  if (points.empty()) throw TrajectoryError("fitness needs a nonempty bundle");

  Fitness result;
  result.points = points.size();
  for (const auto& point : points) {
    if (reach_local(point.pose, design)) continue;
    ++result.unreachable;
    const auto failure = full_ik(point.pose, design);
    ++result.failed_stage_histogram[static_cast<std::size_t>(failure.failed_stage)];
  }

  if (result.unreachable == 0) {
    std::vector<double> etas;
    etas.reserve(points.size());
    for (const auto& point : points) {
      const double eta = eta_local(point.pose, design).eta;
      if (std::isinf(eta)) ++result.unreachable;
      else etas.push_back(eta);
    }
    if (!etas.empty()) result.eta_global = compensated_sum(etas) / static_cast<double>(etas.size());
  }

  result.feasible = result.unreachable == 0;
  if (result.feasible) {
    result.value = std::min(result.eta_global, kFeasibleCap);
  } else {
    result.value =
        kPenaltyBase + kPenaltySlope * static_cast<double>(result.unreachable) / static_cast<double>(result.points);
  }
  return result;
}

std::mt19937_64 candidate_stream(std::uint64_t seed, std::uint64_t generation, std::uint64_t index) {
  std::seed_seq sequence{static_cast<std::uint32_t>(seed),       static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(generation), static_cast<std::uint32_t>(generation >> 32),
                         static_cast<std::uint32_t>(index),      static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(sequence);
}

Design random_design(std::mt19937_64& rng, const ParameterBounds& bounds) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Design::Flat flat;
  for (int i = 0; i < Design::kSize; ++i) flat(i) = bounds.lower(i) + unit(rng) * (bounds.upper(i) - bounds.lower(i));
  return Design::unflatten(bounds.project(flat));
}

namespace {

bool better(const Candidate& a, std::size_t ia, const Candidate& b, std::size_t ib) {
  if (a.fitness.value != b.fitness.value) return a.fitness.value < b.fitness.value;
  return ia < ib;
}

std::size_t best_index(const std::vector<Candidate>& population) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < population.size(); ++i)
    if (better(population[i], i, population[best], best)) best = i;
  return best;
}

GenerationStats summarize(int generation, const std::vector<Candidate>& population) {
  GenerationStats stats;
  stats.generation = generation;
  stats.best = population[best_index(population)].fitness.value;
  std::vector<double> values;
  values.reserve(population.size());
  std::size_t feasible = 0;
  for (const auto& candidate : population) {
    values.push_back(candidate.fitness.value);
    feasible += candidate.fitness.feasible ? 1 : 0;
  }
  stats.mean = compensated_sum(values) / static_cast<double>(values.size());
  stats.feasible_fraction = static_cast<double>(feasible) / static_cast<double>(population.size());
  return stats;
}

std::size_t tournament_pick(std::mt19937_64& rng, const std::vector<Candidate>& population, int size) {
  std::uniform_int_distribution<std::size_t> pick(0, population.size() - 1);
  std::size_t winner = pick(rng);
  for (int round = 1; round < size; ++round) {
    const std::size_t challenger = pick(rng);
    if (better(population[challenger], challenger, population[winner], winner)) winner = challenger;
  }
  return winner;
}

Design::Flat breed(std::mt19937_64& rng, const GaConfig& config, const Design::Flat& first, const Design::Flat& second) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gaussian(0.0, 1.0);

  Design::Flat child = first;
  if (unit(rng) < config.crossover_rate) {
    for (int i = 0; i < Design::kSize; ++i) {
      const double low = std::min(first(i), second(i));
      const double high = std::max(first(i), second(i));
      const double spread = config.blend_alpha * (high - low);
      child(i) = (low - spread) + unit(rng) * ((high + spread) - (low - spread));
    }
  }
  const Design::Flat range = config.bounds.upper - config.bounds.lower;
  for (int i = 0; i < Design::kSize; ++i) {
    if (unit(rng) < config.mutation_rate) child(i) += gaussian(rng) * config.mutation_scale * range(i);
  }
  return config.bounds.project(child);
}

void evaluate(std::vector<Candidate>& population, std::size_t first, const TrajectoryBundle& bundle, unsigned threads) {
  parallel_for(population.size() - first, threads, [&](std::size_t offset) {
    auto& candidate = population[first + offset];
    candidate.fitness = fitness(candidate.design, bundle);
  });
}

}  // namespace

GaTrace evolve(const GaConfig& config, const TrajectoryBundle& bundle, unsigned threads) {
  validate(config);
  const auto size = static_cast<std::size_t>(config.population);

  std::vector<Candidate> population(size);
  for (std::size_t i = 0; i < size; ++i) {
    auto rng = candidate_stream(config.seed, 0, i);
    population[i].design = random_design(rng, config.bounds);
  }
  evaluate(population, 0, bundle, threads);

  GaTrace trace;
  trace.evaluations = size;
  trace.generations.push_back(summarize(0, population));

  int stalled = 0;
  for (int generation = 1; generation < config.generations; ++generation) {
    std::vector<std::size_t> order(size);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return better(population[a], a, population[b], b); });

    std::vector<Candidate> next(size);
    const auto elite = static_cast<std::size_t>(config.elite);
    for (std::size_t j = 0; j < elite; ++j) next[j] = population[order[j]];
    for (std::size_t i = elite; i < size; ++i) {
      auto rng = candidate_stream(config.seed, static_cast<std::uint64_t>(generation), i);
      const auto& first = population[tournament_pick(rng, population, config.tournament)];
      const auto& second = population[tournament_pick(rng, population, config.tournament)];
      next[i].design = Design::unflatten(breed(rng, config, first.design.flatten(), second.design.flatten()));
    }
    evaluate(next, elite, bundle, threads);
    trace.evaluations += size - elite;
    population = std::move(next);

    const double previous = trace.generations.back().best;
    trace.generations.push_back(summarize(generation, population));
    if (previous - trace.generations.back().best < config.convergence) ++stalled;
    else stalled = 0;
    if (stalled >= config.patience) {
      trace.converged = true;
      break;
    }
  }
  trace.best = population[best_index(population)];
  return trace;
}

Candidate random_search(const GaConfig& config, const TrajectoryBundle& bundle, int count, unsigned threads) {
  validate(config);
  if (count < 1) throw ConfigError("random search needs at least one sample");
  std::vector<Candidate> samples(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto rng = candidate_stream(config.seed, 0, i);
    samples[i].design = random_design(rng, config.bounds);
  }
  evaluate(samples, 0, bundle, threads);
  return samples[best_index(samples)];
}

void write_trace_csv(std::ostream& out, const GaTrace& trace) {
  out << "generation,best,mean,feasible_fraction\n";
  for (const auto& stats : trace.generations) {
    out << stats.generation << ',' << format_double(stats.best) << ',' << format_double(stats.mean) << ','
        << format_double(stats.feasible_fraction) << '\n';
  }
}

}  // namespace arcube
