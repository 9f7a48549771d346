/**
 * @file campaign_runner.hpp
 * @brief Distance-maximizing control campaigns over the harmonic count K.
 *
 * The cost of a decision vector (angles, omega, p, q) is J = -|z(tf) - z(t0)|
 * for the capsule started at rest. A non-iterative campaign optimizes every
 * K from random populations; an iterative campaign seeds K+1 with the exact
 * extension of the best K-harmonic vector, so per-trial distance cannot
 * decrease from one K to the next.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fourierctl/capsule_plant.hpp"
#include "fourierctl/evolution_optimizer.hpp"
#include "fourierctl/fourier_control.hpp"
#include "fourierctl/hybrid_integrator.hpp"

namespace fourierctl {

enum class CampaignMode { NonIterative, Iterative };

[[nodiscard]] std::string_view to_string(CampaignMode mode);
/// Accepts "iterative" and "noniterative"; throws ConfigError otherwise.
[[nodiscard]] CampaignMode campaign_mode_from_string(std::string_view name);

/// Search box of the decision vector. omega_min <= 0 selects 2 pi / (tf - t0).
struct DecisionBounds {
  double omega_min = 0.0;
  double omega_max = 10.0;
  double p_min = 1e-6;
  double p_max = 1.0;
  double q_min = 1e-6;
  double q_max = 1.0;
};

struct CampaignConfig {
  int k_min = 2;
  int k_max = 10;
  int trials = 5;
  double t0 = 0.0;
  double tf = 100.0;
  CapsuleParams plant{};
  ControlBounds control_bounds{};
  DecisionBounds decision_bounds{};
  IntegratorConfig integrator{};
  DeConfig de{};
  CampaignMode mode = CampaignMode::Iterative;
  std::uint64_t base_seed = 1;
  double improvement_threshold = 1e-6;  ///< iterative: minimum distance gain to continue to K+1
  bool stop_on_stagnation = true;       ///< iterative: stop a trial once the gain falls below the threshold
  std::size_t grid_points = kDefaultNormalizationGrid;

  /// Throws ContractViolation on inconsistent settings.
  void validate() const;
  [[nodiscard]] double resolved_omega_min() const;
};

/// Decision vector layout: [angles (2K-1), omega, p, q].
[[nodiscard]] std::size_t decision_dimension(int harmonics);
[[nodiscard]] BoxBounds decision_bounds(int harmonics, const CampaignConfig& config);
/// Throws DimensionError when the length is not 2K + 2.
[[nodiscard]] std::pair<ControlShape, SpanParams> split_decision(std::span<const double> v, int harmonics);
[[nodiscard]] std::vector<double> join_decision(const ControlShape& shape, const SpanParams& span);
/// K -> K+1 via extend_harmonics; omega, p and q are carried over.
[[nodiscard]] std::vector<double> extend_decision(std::span<const double> v, int harmonics);
[[nodiscard]] FourierControl control_from_decision(std::span<const double> v, int harmonics,
                                                   const CampaignConfig& config);

/// Capsule run from rest under `control`, with samples recorded when
/// `record` is set.
[[nodiscard]] Trajectory<4> simulate_control(const FourierControl& control, const CampaignConfig& config,
                                             bool record);

struct CostEvaluation {
  double cost = 0.0;
  std::optional<std::string> diagnostic;  ///< set when the simulation failed (cost is +inf)
};

/// J = -|z(tf) - z(t0)|; integrator failures give +inf with a diagnostic.
[[nodiscard]] CostEvaluation evaluate_cost_detailed(std::span<const double> v, int harmonics,
                                                    const CampaignConfig& config);
[[nodiscard]] double evaluate_cost(std::span<const double> v, int harmonics, const CampaignConfig& config);

/// (z_next - z_prev) / z_prev * 100; empty when z_prev == 0.
[[nodiscard]] std::optional<double> relative_change(double z_prev, double z_next);

struct TrialRecord {
  int harmonics = 0;
  int trial = 0;
  std::vector<double> decision;
  double cost = 0.0;
  double distance = 0.0;
  double final_z = 0.0;
  std::optional<double> relative_change;  ///< vs the same trial at the previous K
  double wall_time_s = 0.0;
  std::size_t evaluation_count = 0;
  int generations = 0;
  std::uint64_t rng_seed = 0;
  bool seeded = false;
  std::size_t events = 0;
  std::size_t flagged_steps = 0;  ///< accepted steps with non-positive contact load
  std::vector<double> cost_history;
};

struct KSummary {
  int harmonics = 0;
  std::size_t trials = 0;
  double mean_distance = 0.0;
  double sd_distance = 0.0;
  bool sd_from_single_trial = false;
  std::optional<double> relative_change;  ///< of the mean vs the previous K
  double best_distance = 0.0;
};

struct TrialFailure {
  int trial = 0;
  int harmonics = 0;
  std::string message;
};

struct CampaignRecord {
  CampaignMode mode = CampaignMode::Iterative;
  std::vector<TrialRecord> records;
  std::vector<KSummary> summary;
  std::vector<TrialFailure> failures;
  std::vector<std::string> diagnostics;
  std::vector<std::string> notes;
  std::optional<std::size_t> best_index;  ///< into records, largest distance

  [[nodiscard]] const TrialRecord* best() const {
    return best_index ? &records[*best_index] : nullptr;
  }
};

/// Mean, sample standard deviation (n - 1), change of means and best per K.
[[nodiscard]] std::vector<KSummary> summarize(const std::vector<TrialRecord>& records);

[[nodiscard]] CampaignRecord run_noniterative(const CampaignConfig& config);
[[nodiscard]] CampaignRecord run_iterative(const CampaignConfig& config);
/// Dispatches on config.mode.
[[nodiscard]] CampaignRecord run_campaign(const CampaignConfig& config);

}  // namespace fourierctl
