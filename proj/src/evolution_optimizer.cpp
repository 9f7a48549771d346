#include "fourierctl/evolution_optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

#include "fourierctl/errors.hpp"

namespace fourierctl {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr double kSeedClipTolerance = 1e-12;

double sanitize(double cost) { return std::isfinite(cost) ? cost : kInfinity; }

std::size_t best_index(const std::vector<double>& costs) {
  return static_cast<std::size_t>(std::min_element(costs.begin(), costs.end()) - costs.begin());
}

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<double> random_member(const BoxBounds& bounds, std::mt19937_64& rng) {
  std::vector<double> x(bounds.dimension());
  for (std::size_t d = 0; d < x.size(); ++d) x[d] = uniform_in(rng, bounds.lower[d], bounds.upper[d]);
  return x;
}

}  // namespace

bool BoxBounds::contains(std::span<const double> x) const {
  if (x.size() != dimension()) return false;
  for (std::size_t d = 0; d < x.size(); ++d) {
    if (!(x[d] >= lower[d] && x[d] <= upper[d])) return false;
  }
  return true;
}

void BoxBounds::validate() const {
  if (lower.size() != upper.size()) throw DimensionError("bounds: lower and upper differ in length");
  if (lower.empty()) throw DimensionError("bounds: dimension must be positive");
  for (std::size_t d = 0; d < lower.size(); ++d) {
    if (!std::isfinite(lower[d]) || !std::isfinite(upper[d])) {
      throw ContractViolation("bounds must be finite");
    }
    if (lower[d] > upper[d]) {
      std::ostringstream msg;
      msg << "bounds: lower[" << d << "] = " << lower[d] << " exceeds upper = " << upper[d];
      throw ContractViolation(msg.str());
    }
  }
}

void DeConfig::validate() const {
  if (population_size != 0 && population_size < 4) {
    throw ContractViolation("population_size must be >= 4 (or 0 for automatic)");
  }
  if (max_generations < 0) throw ContractViolation("max_generations must be >= 0");
  if (!(mutation_min >= 0.0) || !(mutation_max <= 2.0) || mutation_min > mutation_max) {
    throw ContractViolation("mutation range must satisfy 0 <= min <= max <= 2");
  }
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) {
    throw ContractViolation("crossover_rate must lie in [0, 1]");
  }
  if (!(stagnation_tolerance >= 0.0)) throw ContractViolation("stagnation_tolerance must be >= 0");
  if (stagnation_generations < 0) throw ContractViolation("stagnation_generations must be >= 0");
  if (jobs < 1) throw ContractViolation("jobs must be >= 1");
}

std::size_t DeConfig::resolved_population(std::size_t dimension) const {
  if (population_size != 0) return population_size;
  return std::clamp<std::size_t>(15 * dimension, 4, 90);
}

std::vector<double> evaluate_batch(const Objective& objective,
                                   const std::vector<std::vector<double>>& candidates, int jobs) {
  std::vector<double> costs(candidates.size(), kInfinity);
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), candidates.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < candidates.size(); ++i) costs[i] = sanitize(objective(candidates[i]));
    return costs;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  const auto work = [&]() {
    for (std::size_t i = next++; i < candidates.size(); i = next++) {
      if (failed.load()) return;
      try {
        costs[i] = sanitize(objective(candidates[i]));
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& thread : pool) thread.join();
  if (failure) std::rethrow_exception(failure);
  return costs;
}

std::size_t de_generation(Population& population, const Objective& objective, const BoxBounds& bounds,
                          const DeConfig& config, std::mt19937_64& rng) {
  const std::size_t n = population.members.size();
  const std::size_t dim = bounds.dimension();
  if (n < 4) throw ContractViolation("de_generation needs at least 4 members");
  if (population.costs.size() != n) throw DimensionError("population and cost lengths differ");

  const double F = uniform_in(rng, config.mutation_min, config.mutation_max);
  std::uniform_int_distribution<std::size_t> pick_member(0, n - 1);
  std::uniform_int_distribution<std::size_t> pick_dimension(0, dim - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const std::size_t best = best_index(population.costs);
  std::vector<std::vector<double>> trials(n, std::vector<double>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r1;
    std::size_t r2;
    std::size_t r3;
    do r1 = pick_member(rng);
    while (r1 == i);
    do r2 = pick_member(rng);
    while (r2 == i || r2 == r1);
    do r3 = pick_member(rng);
    while (r3 == i || r3 == r1 || r3 == r2);

    const auto& parent = population.members[i];
    const auto& x1 = population.members[config.strategy == DeStrategy::Best1Bin ? best : r1];
    const auto& x2 = population.members[r2];
    const auto& x3 = population.members[r3];
    const std::size_t forced = pick_dimension(rng);
    auto& trial = trials[i];
    for (std::size_t d = 0; d < dim; ++d) {
      const bool cross = d == forced || unit(rng) < config.crossover_rate;
      trial[d] = cross ? x1[d] + F * (x2[d] - x3[d]) : parent[d];
      if (!(trial[d] >= bounds.lower[d] && trial[d] <= bounds.upper[d])) {
        trial[d] = uniform_in(rng, bounds.lower[d], bounds.upper[d]);
      }
    }
  }

  const std::vector<double> costs =
      evaluate_batch(objective, trials, config.parallel_evaluations ? config.jobs : 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (costs[i] <= population.costs[i]) {
      population.members[i] = std::move(trials[i]);
      population.costs[i] = costs[i];
    }
  }
  return n;
}

OptimizationResult optimize(const Objective& objective, const BoxBounds& bounds, const DeConfig& config,
                            const std::vector<std::vector<double>>& seed_members) {
  bounds.validate();
  config.validate();
  const std::size_t dim = bounds.dimension();
  const std::size_t n = config.resolved_population(dim);

  OptimizationResult result;
  result.rng_seed = config.rng_seed;
  result.population_size = n;

  std::vector<std::vector<double>> seeds;
  for (const auto& seed : seed_members) {
    if (seed.size() != dim) throw DimensionError("seed member has the wrong dimension");
    std::vector<double> clipped = seed;
    for (std::size_t d = 0; d < dim; ++d) {
      const double lo = bounds.lower[d];
      const double hi = bounds.upper[d];
      if (clipped[d] >= lo && clipped[d] <= hi) continue;
      if (clipped[d] >= lo - kSeedClipTolerance && clipped[d] <= hi + kSeedClipTolerance) {
        clipped[d] = std::clamp(clipped[d], lo, hi);
        std::ostringstream msg;
        msg << "seed component " << d << " clipped into [" << lo << ", " << hi << "]";
        result.warnings.push_back(msg.str());
        continue;
      }
      std::ostringstream msg;
      msg << "seed component " << d << " = " << seed[d] << " lies outside [" << lo << ", " << hi << "]";
      throw ContractViolation(msg.str());
    }
    seeds.push_back(std::move(clipped));
  }
  if (seeds.size() > n) throw ContractViolation("more seed members than population slots");

  std::mt19937_64 rng(config.rng_seed);
  Population population;
  population.members.reserve(n);
  for (std::size_t i = 0; i < n; ++i) population.members.push_back(random_member(bounds, rng));
  for (std::size_t i = 0; i < seeds.size(); ++i) population.members[i] = seeds[i];

  population.costs = evaluate_batch(objective, population.members,
                                    config.parallel_evaluations ? config.jobs : 1);
  result.evaluation_count = n;
  result.cost_history.push_back(population.costs[best_index(population.costs)]);

  const auto window = static_cast<std::size_t>(config.stagnation_generations);
  for (int g = 0; g < config.max_generations; ++g) {
    result.evaluation_count += de_generation(population, objective, bounds, config, rng);
    ++result.generations;
    result.cost_history.push_back(population.costs[best_index(population.costs)]);
    const std::size_t h = result.cost_history.size() - 1;
    if (window > 0 && h >= window) {
      const double before = result.cost_history[h - window];
      const double now = result.cost_history[h];
      const bool stalled = std::isfinite(before) ? before - now < config.stagnation_tolerance
                                                 : !std::isfinite(now);
      if (stalled) {
        result.stopped_on_stagnation = true;
        break;
      }
    }
  }

  const std::size_t best = best_index(population.costs);
  result.best_vector = population.members[best];
  result.best_cost = population.costs[best];
  return result;
}

}  // namespace fourierctl
