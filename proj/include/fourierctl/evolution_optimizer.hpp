/**
 * @file evolution_optimizer.hpp
 * @brief Differential Evolution (rand/1/bin, best/1/bin) over box-bounded real vectors.
 *
 * Seed members overwrite the first entries of the random initial population.
 * Greedy one-to-one selection then keeps the best cost non-increasing, so the
 * returned cost never exceeds the cost of any seed.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace fourierctl {

/// Per-dimension closed interval [lower[i], upper[i]].
struct BoxBounds {
  std::vector<double> lower;
  std::vector<double> upper;

  [[nodiscard]] std::size_t dimension() const { return lower.size(); }
  [[nodiscard]] bool contains(std::span<const double> x) const;

  /// Throws DimensionError on length mismatch and ContractViolation when
  /// lower[i] > upper[i] or a bound is not finite.
  void validate() const;
};

/// Base vector of the mutation: a random member (rand/1) or the current best (best/1).
enum class DeStrategy { Rand1Bin, Best1Bin };

struct DeConfig {
  DeStrategy strategy = DeStrategy::Rand1Bin;
  std::size_t population_size = 0;  ///< 0 selects 15 * dimension, capped at 90
  int max_generations = 300;
  double mutation_min = 0.5;        ///< F is drawn uniformly from [mutation_min, mutation_max] per generation
  double mutation_max = 1.0;
  double crossover_rate = 0.7;
  std::uint64_t rng_seed = 0;
  double stagnation_tolerance = 1e-8;
  int stagnation_generations = 40;  ///< 0 disables the stagnation stop
  bool parallel_evaluations = false;
  int jobs = 1;                     ///< worker threads when parallel_evaluations is set

  void validate() const;
  [[nodiscard]] std::size_t resolved_population(std::size_t dimension) const;
};

struct OptimizationResult {
  std::vector<double> best_vector;
  double best_cost = 0.0;
  std::vector<double> cost_history;  ///< best cost of the initial population, then after every generation
  std::size_t evaluation_count = 0;
  std::uint64_t rng_seed = 0;
  int generations = 0;
  std::size_t population_size = 0;
  bool stopped_on_stagnation = false;
  std::vector<std::string> warnings;
};

using Objective = std::function<double(std::span<const double>)>;

struct Population {
  std::vector<std::vector<double>> members;
  std::vector<double> costs;
};

/// Evaluates all candidates, mapping non-finite values to +inf. With jobs > 1
/// the work is spread over threads; the result does not depend on scheduling.
[[nodiscard]] std::vector<double> evaluate_batch(const Objective& objective,
                                                 const std::vector<std::vector<double>>& candidates,
                                                 int jobs);

/**
 * @brief One DE generation (rand/1/bin or best/1/bin).
 *
 * Draws F for the generation and builds one trial per member from three
 * distinct other members (for best/1/bin the base vector is the current
 * best instead). Out-of-bounds components are resampled uniformly. Each
 * parent is replaced when its trial cost is less than or equal to its own.
 * Returns the number of objective evaluations (the population size).
 */
std::size_t de_generation(Population& population, const Objective& objective, const BoxBounds& bounds,
                          const DeConfig& config, std::mt19937_64& rng);

/**
 * @brief Minimizes `objective` over `bounds`.
 *
 * Seeds must lie inside the bounds; components outside by less than 1e-12
 * are clipped with a warning, larger violations throw ContractViolation.
 * Throws DimensionError when a seed has the wrong length.
 */
[[nodiscard]] OptimizationResult optimize(const Objective& objective, const BoxBounds& bounds,
                                          const DeConfig& config,
                                          const std::vector<std::vector<double>>& seed_members = {});

}  // namespace fourierctl
