/**
 * @file hybrid_integrator.hpp
 * @brief Dormand-Prince 5(4) integration of piecewise-smooth systems with
 *        bisection-located mode switches.
 *
 * A HybridSystem supplies, for each discrete mode, a smooth vector field, a
 * set of event functions and a transition map. Event functions are positive
 * while the mode is valid; an accepted step that ends with an event value
 * below zero is first narrowed on the step's continuous extension, then
 * bisected by re-integrating sub-steps from the step start until the crossing
 * is bracketed to `event_tol_time`. The transition is
 * applied on the post-crossing side of the bracket.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include "fourierctl/errors.hpp"

namespace fourierctl {

template <std::size_t N>
using StateVector = std::array<double, N>;

struct IntegratorConfig {
  double abs_tol = 1e-9;
  double rel_tol = 1e-12;
  double initial_step = 1e-3;
  double max_step = 0.1;
  double event_tol_time = 1e-12;
  int max_event_bisections = 100;
  std::size_t max_events = 1'000'000;
  bool record_samples = true;  ///< false keeps only the final state and event log

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw ContractViolation("integrator tolerances must be positive");
    if (!(initial_step > 0.0) || !(max_step > 0.0)) throw ContractViolation("integrator steps must be positive");
    if (!(event_tol_time > 0.0)) throw ContractViolation("event_tol_time must be positive");
    if (max_event_bisections < 1) throw ContractViolation("max_event_bisections must be >= 1");
    if (max_events < 1) throw ContractViolation("max_events must be >= 1");
  }
};

template <std::size_t N>
struct ModeTransition {
  int mode = 0;
  StateVector<N> state{};
};

/// Piecewise-smooth system driven by a scalar control value.
template <std::size_t N>
class HybridSystem {
 public:
  using State = StateVector<N>;

  virtual ~HybridSystem() = default;

  virtual State derivative(int mode, double t, const State& y, double u) const = 0;
  virtual std::size_t event_count(int mode) const = 0;
  /// Positive while `mode` holds; the mode ends when the value drops to zero or below.
  virtual double event_value(int mode, std::size_t event, double t, const State& y, double u) const = 0;
  virtual ModeTransition<N> transition(int mode, std::size_t event, double t, const State& y,
                                       double u) const = 0;
  /// Accepted steps ending in a state for which this returns true are counted
  /// in Trajectory::flagged_steps.
  virtual bool flag_state(int /*mode*/, double /*t*/, const State& /*y*/, double /*u*/) const {
    return false;
  }
};

struct EventRecord {
  double time = 0.0;
  int from_mode = 0;
  int to_mode = 0;
  std::size_t event_index = 0;
  double residual = 0.0;  ///< event function value at the located time, before the transition
};

template <std::size_t N>
struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector<N>> states;
  std::vector<int> modes;
  std::vector<double> controls;
  std::vector<EventRecord> events;

  double final_time = 0.0;
  StateVector<N> final_state{};
  int final_mode = 0;

  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t flagged_steps = 0;
};

template <std::size_t N>
struct StepResult {
  StateVector<N> state{};
  StateVector<N> error_estimate{};  ///< 5th-order minus 4th-order solution
  StateVector<N> end_derivative{};  ///< derivative at (t + h, state); first stage of the next step
  double error_ratio = 0.0;         ///< max_i |err_i| / (abs_tol + rel_tol max(|y_i|, |y_new_i|))
  double suggested_step = 0.0;
  bool accepted = false;
};

namespace detail {

struct DormandPrince {
  static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                          a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                          b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
};

constexpr double kSafety = 0.9;
constexpr double kMinShrink = 0.2;
constexpr double kMaxGrowth = 5.0;

inline double minimum_step(double t) { return 1e-14 * std::max(1.0, std::abs(t)); }

/// One Dormand-Prince step given the derivative at the step start.
template <std::size_t N>
using Stages = std::array<StateVector<N>, 7>;

/// Stages k2..k6 of a step; returns the 5th-order solution.
template <std::size_t N, class Derivative>
StateVector<N> dormand_prince_stages(const Derivative& f, double t, const StateVector<N>& y,
                                     const StateVector<N>& k1, double h, Stages<N>& k) {
  using DP = DormandPrince;
  k[0] = k1;
  StateVector<N> tmp;
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * DP::a21 * k1[i];
  k[1] = f(t + DP::c2 * h, tmp);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (DP::a31 * k1[i] + DP::a32 * k[1][i]);
  k[2] = f(t + DP::c3 * h, tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (DP::a41 * k1[i] + DP::a42 * k[1][i] + DP::a43 * k[2][i]);
  k[3] = f(t + DP::c4 * h, tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (DP::a51 * k1[i] + DP::a52 * k[1][i] + DP::a53 * k[2][i] + DP::a54 * k[3][i]);
  k[4] = f(t + DP::c5 * h, tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (DP::a61 * k1[i] + DP::a62 * k[1][i] + DP::a63 * k[2][i] + DP::a64 * k[3][i] +
                         DP::a65 * k[4][i]);
  k[5] = f(t + h, tmp);
  StateVector<N> out;
  for (std::size_t i = 0; i < N; ++i)
    out[i] = y[i] + h * (DP::b1 * k1[i] + DP::b3 * k[2][i] + DP::b4 * k[3][i] + DP::b5 * k[4][i] +
                         DP::b6 * k[5][i]);
  return out;
}

/// 5th-order solution of a step of size h without the error estimate.
template <std::size_t N, class Derivative>
StateVector<N> dormand_prince_state(const Derivative& f, double t, const StateVector<N>& y,
                                    const StateVector<N>& k1, double h) {
  Stages<N> k;
  return dormand_prince_stages<N>(f, t, y, k1, h, k);
}

/// Fourth-order continuous extension of an accepted step at fraction theta.
template <std::size_t N>
StateVector<N> dense_output(const Stages<N>& k, const StateVector<N>& y, double h, double theta) {
  static constexpr double P[7][4] = {
      {1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0, -12715105075.0 / 11282082432.0},
      {0.0, 0.0, 0.0, 0.0},
      {0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0,
       87487479700.0 / 32700410799.0},
      {0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0, -10690763975.0 / 1880347072.0},
      {0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0,
       701980252875.0 / 199316789632.0},
      {0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0},
      {0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0}};
  const double powers[4] = {theta, theta * theta, theta * theta * theta, theta * theta * theta * theta};
  StateVector<N> out = y;
  for (std::size_t s = 0; s < 7; ++s) {
    const double w = h * (P[s][0] * powers[0] + P[s][1] * powers[1] + P[s][2] * powers[2] +
                          P[s][3] * powers[3]);
    if (w == 0.0) continue;
    for (std::size_t i = 0; i < N; ++i) out[i] += w * k[s][i];
  }
  return out;
}

/// One Dormand-Prince step given the derivative at the step start. When
/// `stages` is given it receives k1..k7 for dense output.
template <std::size_t N, class Derivative>
StepResult<N> dormand_prince_step(const Derivative& f, double t, const StateVector<N>& y,
                                  const StateVector<N>& k1, double h, const IntegratorConfig& config,
                                  Stages<N>* stages = nullptr) {
  using DP = DormandPrince;
  Stages<N> local;
  Stages<N>& k = stages ? *stages : local;
  StepResult<N> out;
  out.state = dormand_prince_stages<N>(f, t, y, k1, h, k);
  out.end_derivative = f(t + h, out.state);
  k[6] = out.end_derivative;
  const StateVector<N>& k3 = k[2];
  const StateVector<N>& k4 = k[3];
  const StateVector<N>& k5 = k[4];
  const StateVector<N>& k6 = k[5];
  const StateVector<N>& k7 = k[6];

  double ratio = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    out.error_estimate[i] = h * (DP::e1 * k1[i] + DP::e3 * k3[i] + DP::e4 * k4[i] + DP::e5 * k5[i] +
                                 DP::e6 * k6[i] + DP::e7 * k7[i]);
    const double scale =
        config.abs_tol + config.rel_tol * std::max(std::abs(y[i]), std::abs(out.state[i]));
    ratio = std::max(ratio, std::abs(out.error_estimate[i]) / scale);
  }
  out.error_ratio = ratio;
  out.accepted = ratio <= 1.0;

  double factor = kMaxGrowth;
  if (ratio > 0.0) factor = std::clamp(kSafety * std::pow(ratio, -0.2), kMinShrink, kMaxGrowth);
  if (!std::isfinite(ratio)) factor = kMinShrink;
  out.suggested_step = h * factor;
  return out;
}

/// Bisection on [lo, hi] where `triggered(hi)` holds and `triggered(lo)` does
/// not. Returns the triggered end of the final bracket.
template <class Predicate>
double bisect_transition(const Predicate& triggered, double lo, double hi,
                         const IntegratorConfig& config) {
  for (int i = 0; i < config.max_event_bisections && hi - lo > config.event_tol_time; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (triggered(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

/// Narrows [lo, hi] with an inexpensive approximation of `triggered`, then
/// confirms the narrowed bracket with `triggered` itself. Returns the input
/// bracket when confirmation fails at every trial width.
template <class Approx, class Predicate>
std::pair<double, double> narrow_bracket(const Approx& approx, const Predicate& triggered, double lo,
                                         double hi, const IntegratorConfig& config) {
  double a = lo;
  double b = hi;
  const double width = std::max(config.event_tol_time, 1e-11);
  for (int i = 0; i < 200 && b - a > width; ++i) {
    const double mid = a + 0.5 * (b - a);
    if (mid <= a || mid >= b) break;
    if (approx(mid)) {
      b = mid;
    } else {
      a = mid;
    }
  }
  for (const double delta : {1e-8, 1e-6, 1e-4}) {
    const double left = std::max(lo, a - delta);
    const double right = std::min(hi, b + delta);
    if (left == lo && right == hi) break;
    if (left > lo && triggered(left)) continue;
    if (right < hi && !triggered(right)) continue;
    return {left, right};
  }
  return {lo, hi};
}

}  // namespace detail

/**
 * @brief Single Dormand-Prince 5(4) step of size h from (t, y).
 *
 * Throws ContractViolation for h <= 0 and StiffnessError when h has fallen
 * below 1e-14 max(1, |t|).
 */
template <std::size_t N, class Derivative>
StepResult<N> rk45_step(const Derivative& f, const StateVector<N>& y, double t, double h,
                        const IntegratorConfig& config) {
  if (!(h > 0.0)) throw ContractViolation("rk45_step requires h > 0");
  if (h < detail::minimum_step(t)) {
    std::ostringstream msg;
    msg << "step size underflow: h = " << h << " at t = " << t;
    throw StiffnessError(msg.str());
  }
  const StateVector<N> k1 = f(t, y);
  return detail::dormand_prince_step<N>(f, t, y, k1, h, config);
}

/**
 * @brief Zero of g in [t_a, t_b] by bisection, to within event_tol_time.
 *
 * Requires g(t_a) g(t_b) <= 0 (ContractViolation otherwise). A zero at an
 * endpoint is returned as is; otherwise the returned time lies on the same
 * side of the zero as t_b.
 */
template <class EventFn>
double locate_event(const EventFn& g, double t_a, double t_b, const IntegratorConfig& config) {
  if (!(t_b >= t_a)) throw ContractViolation("locate_event requires t_a <= t_b");
  const double g_a = g(t_a);
  const double g_b = g(t_b);
  if (g_a == 0.0) return t_a;
  if (g_b == 0.0) return t_b;
  if (g_a * g_b > 0.0) throw ContractViolation("locate_event: no sign change over the bracket");
  const bool rising = g_b > 0.0;
  return detail::bisect_transition(
      [&](double t) {
        const double v = g(t);
        return rising ? v >= 0.0 : v <= 0.0;
      },
      t_a, t_b, config);
}

/**
 * @brief Integrates a hybrid system from (t0, y0, mode0) to tf.
 *
 * Modes whose event functions are already negative at t0 are resolved
 * through the transition map before the first step. Every accepted step and
 * every transition is recorded when `record_samples` is set; sample times are
 * strictly increasing and start at t0, end at tf. The run is deterministic.
 *
 * Throws StiffnessError on step underflow and EventStormError when more than
 * `max_events` transitions occur.
 */
template <std::size_t N, class Control>
Trajectory<N> integrate(const HybridSystem<N>& system, const StateVector<N>& y0, int mode0, double t0,
                        double tf, const IntegratorConfig& config, const Control& control) {
  config.validate();
  if (!(tf > t0)) throw ContractViolation("integrate requires tf > t0");

  Trajectory<N> out;
  double t = t0;
  StateVector<N> y = y0;
  int mode = mode0;

  const auto record = [&](double time, const StateVector<N>& state, int m) {
    if (!config.record_samples) return;
    if (!out.times.empty() && time <= out.times.back()) {
      // A transition at the time of the previous sample replaces it.
      out.states.back() = state;
      out.modes.back() = m;
      out.controls.back() = control(time);
      return;
    }
    out.times.push_back(time);
    out.states.push_back(state);
    out.modes.push_back(m);
    out.controls.push_back(control(time));
  };

  const auto apply_transition = [&](std::size_t event, double time, const StateVector<N>& state,
                                    double residual) {
    const double u = control(time);
    const ModeTransition<N> next = system.transition(mode, event, time, state, u);
    out.events.push_back(EventRecord{time, mode, next.mode, event, residual});
    if (out.events.size() > config.max_events) {
      std::ostringstream msg;
      msg << "event storm: more than " << config.max_events << " transitions by t = " << time;
      throw EventStormError(msg.str());
    }
    mode = next.mode;
    y = next.state;
    t = time;
  };

  // Resolve an inconsistent initial mode (bounded: each pass must change the mode).
  for (int pass = 0; pass < 8; ++pass) {
    const double u0 = control(t);
    bool switched = false;
    for (std::size_t e = 0; e < system.event_count(mode); ++e) {
      const double g = system.event_value(mode, e, t, y, u0);
      if (g < 0.0) {
        apply_transition(e, t, y, g);
        switched = true;
        break;
      }
    }
    if (!switched) break;
  }
  record(t, y, mode);

  const auto derivative_in = [&](int m) {
    return [&system, &control, m](double time, const StateVector<N>& state) {
      return system.derivative(m, time, state, control(time));
    };
  };

  double h = std::min(config.initial_step, config.max_step);
  bool have_k1 = false;
  StateVector<N> k1{};
  detail::Stages<N> stages{};

  // Event values at the current step start, refreshed after every step.
  std::vector<double> g_start;
  std::vector<double> g_end;
  const auto evaluate_events = [&](std::vector<double>& into, double time, const StateVector<N>& state,
                                   double u) {
    into.resize(system.event_count(mode));
    for (std::size_t e = 0; e < into.size(); ++e) into[e] = system.event_value(mode, e, time, state, u);
  };
  evaluate_events(g_start, t, y, control(t));

  while (t < tf) {
    const double remaining = tf - t;
    const double capped = std::min(h, config.max_step);
    const bool last = capped >= remaining;
    const double step = last ? remaining : capped;
    if (step < detail::minimum_step(t)) {
      if (last) break;  // already at tf to working precision
      std::ostringstream msg;
      msg << "step size underflow: h = " << step << " at t = " << t;
      throw StiffnessError(msg.str());
    }

    const auto f = derivative_in(mode);
    if (!have_k1) {
      k1 = f(t, y);
      have_k1 = true;
    }
    const StepResult<N> trial = detail::dormand_prince_step<N>(f, t, y, k1, step, config, &stages);
    if (!trial.accepted) {
      ++out.rejected_steps;
      h = trial.suggested_step;
      continue;
    }

    const double t_end = last ? tf : t + step;
    const double u_end = control(t_end);

    // Earliest triggered event over the step, if any.
    std::size_t hit_event = 0;
    double hit_time = std::numeric_limits<double>::infinity();
    evaluate_events(g_end, t_end, trial.state, u_end);
    for (std::size_t e = 0; e < g_end.size(); ++e) {
      const double g_a = g_start[e];
      const double g_b = g_end[e];
      const bool fires = g_b < 0.0 || (g_b == 0.0 && g_a > 0.0);
      if (!fires) continue;
      const auto fired = [&](double time, const StateVector<N>& state) {
        const double g = system.event_value(mode, e, time, state, control(time));
        return g < 0.0 || (g == 0.0 && g_a > 0.0);
      };
      const auto approx = [&](double time) {
        return fired(time, detail::dense_output<N>(stages, y, step, (time - t) / step));
      };
      const auto triggered = [&](double time) {
        return fired(time, detail::dormand_prince_state<N>(f, t, y, k1, time - t));
      };
      const auto [lo, hi] = detail::narrow_bracket(approx, triggered, t, t_end, config);
      const double located = detail::bisect_transition(triggered, lo, hi, config);
      if (located < hit_time) {
        hit_time = located;
        hit_event = e;
      }
    }

    if (!std::isfinite(hit_time)) {
      ++out.accepted_steps;
      if (system.flag_state(mode, t_end, trial.state, u_end)) ++out.flagged_steps;
      t = t_end;
      y = trial.state;
      k1 = trial.end_derivative;
      std::swap(g_start, g_end);
      record(t, y, mode);
      h = trial.suggested_step;
      continue;
    }

    // Advance to the located event with a sub-step from the accepted step's start.
    StateVector<N> event_state = trial.state;
    if (hit_time < t_end) {
      event_state = detail::dormand_prince_state<N>(f, t, y, k1, hit_time - t);
    }
    ++out.accepted_steps;
    const double u_event = control(hit_time);
    if (system.flag_state(mode, hit_time, event_state, u_event)) ++out.flagged_steps;
    const double residual = system.event_value(mode, hit_event, hit_time, event_state, u_event);
    apply_transition(hit_event, hit_time, event_state, residual);
    have_k1 = false;
    evaluate_events(g_start, t, y, control(t));
    record(t, y, mode);
    h = std::max(h, config.initial_step);
  }

  out.final_time = t;
  out.final_state = y;
  out.final_mode = mode;
  return out;
}

}  // namespace fourierctl
