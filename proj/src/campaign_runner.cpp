#include "fourierctl/campaign_runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "fourierctl/errors.hpp"

namespace fourierctl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kMaxDiagnostics = 100;

/// Thread-safe, bounded log of failed cost evaluations.
class DiagnosticLog {
 public:
  void add(std::string message) {
    const std::lock_guard<std::mutex> lock(mutex_);
    ++count_;
    if (entries_.size() < kMaxDiagnostics) entries_.push_back(std::move(message));
  }

  void drain_into(std::vector<std::string>& out) {
    const std::lock_guard<std::mutex> lock(mutex_);
    out.insert(out.end(), entries_.begin(), entries_.end());
    if (count_ > entries_.size()) {
      out.push_back(std::to_string(count_ - entries_.size()) + " further failed evaluations not listed");
    }
    entries_.clear();
    count_ = 0;
  }

 private:
  std::mutex mutex_;
  std::vector<std::string> entries_;
  std::size_t count_ = 0;
};

void run_trial(const CampaignConfig& config, int trial, bool iterative, CampaignRecord& record,
               DiagnosticLog& log) {
  std::mt19937_64 stream(config.base_seed + static_cast<std::uint64_t>(trial));
  std::optional<TrialRecord> previous;

  for (int k = config.k_min; k <= config.k_max; ++k) {
    try {
      DeConfig de = config.de;
      de.rng_seed = stream();

      std::vector<std::vector<double>> seeds;
      if (iterative && previous) seeds.push_back(extend_decision(previous->decision, k - 1));

      const Objective objective = [&config, k, &log](std::span<const double> v) {
        CostEvaluation eval = evaluate_cost_detailed(v, k, config);
        if (eval.diagnostic) log.add("K=" + std::to_string(k) + ": " + *eval.diagnostic);
        return eval.cost;
      };

      const auto started = std::chrono::steady_clock::now();
      const OptimizationResult result = optimize(objective, decision_bounds(k, config), de, seeds);
      const auto finished = std::chrono::steady_clock::now();

      if (!std::isfinite(result.best_cost)) {
        record.failures.push_back({trial, k, "no candidate produced a finite cost"});
        return;
      }

      TrialRecord rec;
      rec.harmonics = k;
      rec.trial = trial;
      rec.decision = result.best_vector;
      rec.cost = result.best_cost;
      rec.distance = -result.best_cost;
      rec.wall_time_s = std::chrono::duration<double>(finished - started).count();
      rec.evaluation_count = result.evaluation_count;
      rec.generations = result.generations;
      rec.rng_seed = de.rng_seed;
      rec.seeded = !seeds.empty();
      rec.cost_history = result.cost_history;

      const Trajectory<4> best_run =
          simulate_control(control_from_decision(rec.decision, k, config), config, false);
      rec.final_z = best_run.final_state[2];
      rec.events = best_run.events.size();
      rec.flagged_steps = best_run.flagged_steps;
      if (rec.flagged_steps > 0) {
        std::ostringstream note;
        note << "trial " << trial << ", K=" << k << ": " << rec.flagged_steps
             << " accepted steps with non-positive contact load";
        record.notes.push_back(note.str());
      }
      if (previous && previous->harmonics == k - 1) {
        rec.relative_change = relative_change(previous->distance, rec.distance);
      }

      record.records.push_back(rec);
      const bool stalled = previous && rec.distance - previous->distance <= config.improvement_threshold;
      previous = std::move(rec);

      if (iterative && config.stop_on_stagnation && stalled && k < config.k_max) {
        std::ostringstream note;
        note << "trial " << trial << " stopped after K=" << k << ": distance gain below "
             << config.improvement_threshold;
        record.notes.push_back(note.str());
        return;
      }
    } catch (const std::exception& e) {
      record.failures.push_back({trial, k, e.what()});
      return;
    }
  }
}

CampaignRecord run(const CampaignConfig& config, CampaignMode mode) {
  config.validate();
  CampaignRecord record;
  record.mode = mode;
  DiagnosticLog log;
  for (int trial = 0; trial < config.trials; ++trial) {
    run_trial(config, trial, mode == CampaignMode::Iterative, record, log);
  }
  log.drain_into(record.diagnostics);

  std::stable_sort(record.records.begin(), record.records.end(),
                   [](const TrialRecord& a, const TrialRecord& b) {
                     return a.harmonics != b.harmonics ? a.harmonics < b.harmonics : a.trial < b.trial;
                   });
  record.summary = summarize(record.records);
  for (std::size_t i = 0; i < record.records.size(); ++i) {
    if (!record.best_index || record.records[i].distance > record.records[*record.best_index].distance) {
      record.best_index = i;
    }
  }
  for (const KSummary& s : record.summary) {
    if (s.sd_from_single_trial) {
      record.notes.push_back("K=" + std::to_string(s.harmonics) +
                             ": single trial, standard deviation reported as 0");
    }
  }
  return record;
}

}  // namespace

std::string_view to_string(CampaignMode mode) {
  return mode == CampaignMode::Iterative ? "iterative" : "noniterative";
}

CampaignMode campaign_mode_from_string(std::string_view name) {
  if (name == "iterative") return CampaignMode::Iterative;
  if (name == "noniterative" || name == "non-iterative") return CampaignMode::NonIterative;
  throw ConfigError("unknown campaign mode '" + std::string(name) + "' (iterative|noniterative)");
}

double CampaignConfig::resolved_omega_min() const {
  return decision_bounds.omega_min > 0.0 ? decision_bounds.omega_min : kTwoPi / (tf - t0);
}

void CampaignConfig::validate() const {
  if (k_min < 1 || k_max < k_min) throw ContractViolation("harmonic range needs 1 <= k_min <= k_max");
  if (trials < 1) throw ContractViolation("trials must be >= 1");
  if (!(tf > t0)) throw ContractViolation("horizon needs tf > t0");
  plant.validate();
  control_bounds.validate();
  integrator.validate();
  de.validate();
  const DecisionBounds& b = decision_bounds;
  if (!(resolved_omega_min() >= kTwoPi / (tf - t0) - 1e-12)) {
    throw ContractViolation("omega_min below one period per horizon");
  }
  if (!(b.omega_max >= resolved_omega_min())) throw ContractViolation("omega_max below omega_min");
  if (!(b.p_min > 0.0 && b.p_min <= b.p_max && b.p_max <= 1.0)) {
    throw ContractViolation("p range must satisfy 0 < p_min <= p_max <= 1");
  }
  if (!(b.q_min > 0.0 && b.q_min <= b.q_max && b.q_max <= 1.0)) {
    throw ContractViolation("q range must satisfy 0 < q_min <= q_max <= 1");
  }
  if (!(improvement_threshold >= 0.0)) throw ContractViolation("improvement_threshold must be >= 0");
  if (grid_points < 2) throw ContractViolation("grid_points must be >= 2");
}

std::size_t decision_dimension(int harmonics) {
  if (harmonics < 1) throw DimensionError("harmonic count must be positive");
  return static_cast<std::size_t>(2 * harmonics + 2);
}

BoxBounds decision_bounds(int harmonics, const CampaignConfig& config) {
  const std::size_t dim = decision_dimension(harmonics);
  const std::size_t n_angles = dim - 3;
  BoxBounds bounds;
  bounds.lower.assign(dim, 0.0);
  bounds.upper.assign(dim, std::numbers::pi);
  bounds.upper[n_angles - 1] = std::nextafter(kTwoPi, 0.0);
  bounds.lower[n_angles] = config.resolved_omega_min();
  bounds.upper[n_angles] = config.decision_bounds.omega_max;
  bounds.lower[n_angles + 1] = config.decision_bounds.p_min;
  bounds.upper[n_angles + 1] = config.decision_bounds.p_max;
  bounds.lower[n_angles + 2] = config.decision_bounds.q_min;
  bounds.upper[n_angles + 2] = config.decision_bounds.q_max;
  return bounds;
}

std::pair<ControlShape, SpanParams> split_decision(std::span<const double> v, int harmonics) {
  const std::size_t dim = decision_dimension(harmonics);
  if (v.size() != dim) {
    throw DimensionError("decision vector for K=" + std::to_string(harmonics) + " needs " +
                         std::to_string(dim) + " entries, got " + std::to_string(v.size()));
  }
  const std::size_t n_angles = dim - 3;
  ControlShape shape;
  shape.angles.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n_angles));
  shape.omega = v[n_angles];
  shape.harmonics = harmonics;
  return {shape, SpanParams{v[n_angles + 1], v[n_angles + 2]}};
}

std::vector<double> join_decision(const ControlShape& shape, const SpanParams& span) {
  std::vector<double> v = shape.angles;
  v.push_back(shape.omega);
  v.push_back(span.p);
  v.push_back(span.q);
  return v;
}

std::vector<double> extend_decision(std::span<const double> v, int harmonics) {
  const auto [shape, span] = split_decision(v, harmonics);
  return join_decision(extend_harmonics(shape), span);
}

FourierControl control_from_decision(std::span<const double> v, int harmonics,
                                     const CampaignConfig& config) {
  const auto [shape, span] = split_decision(v, harmonics);
  return build_control(shape, span, config.control_bounds, config.t0, config.tf, config.grid_points);
}

Trajectory<4> simulate_control(const FourierControl& control, const CampaignConfig& config, bool record) {
  const CapsulePlant plant(config.plant);
  IntegratorConfig integrator = config.integrator;
  integrator.record_samples = record;
  return integrate<4>(plant, CapsulePlant::State{0.0, 0.0, 0.0, 0.0}, static_cast<int>(ContactMode::Stick),
                      config.t0, config.tf, integrator,
                      [&control](double t) { return control.evaluate(t); });
}

CostEvaluation evaluate_cost_detailed(std::span<const double> v, int harmonics,
                                      const CampaignConfig& config) {
  const FourierControl control = control_from_decision(v, harmonics, config);
  try {
    const Trajectory<4> run = simulate_control(control, config, false);
    // The capsule starts at z = 0.
    return {-std::abs(run.final_state[2]), std::nullopt};
  } catch (const std::runtime_error& e) {
    return {std::numeric_limits<double>::infinity(), std::string(e.what())};
  }
}

double evaluate_cost(std::span<const double> v, int harmonics, const CampaignConfig& config) {
  return evaluate_cost_detailed(v, harmonics, config).cost;
}

std::optional<double> relative_change(double z_prev, double z_next) {
  if (z_prev == 0.0) return std::nullopt;
  return (z_next - z_prev) / z_prev * 100.0;
}

std::vector<KSummary> summarize(const std::vector<TrialRecord>& records) {
  std::vector<int> ks;
  for (const TrialRecord& r : records) ks.push_back(r.harmonics);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  std::vector<KSummary> out;
  for (const int k : ks) {
    std::vector<double> d;
    for (const TrialRecord& r : records) {
      if (r.harmonics == k) d.push_back(r.distance);
    }
    KSummary s;
    s.harmonics = k;
    s.trials = d.size();
    s.mean_distance = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
    s.best_distance = *std::max_element(d.begin(), d.end());
    if (d.size() > 1) {
      double ss = 0.0;
      for (const double x : d) ss += (x - s.mean_distance) * (x - s.mean_distance);
      s.sd_distance = std::sqrt(ss / static_cast<double>(d.size() - 1));
    } else {
      s.sd_from_single_trial = true;
    }
    if (!out.empty() && out.back().harmonics == k - 1) {
      s.relative_change = relative_change(out.back().mean_distance, s.mean_distance);
    }
    out.push_back(s);
  }
  return out;
}

CampaignRecord run_noniterative(const CampaignConfig& config) {
  return run(config, CampaignMode::NonIterative);
}

CampaignRecord run_iterative(const CampaignConfig& config) { return run(config, CampaignMode::Iterative); }

CampaignRecord run_campaign(const CampaignConfig& config) {
  return config.mode == CampaignMode::Iterative ? run_iterative(config) : run_noniterative(config);
}

}  // namespace fourierctl
