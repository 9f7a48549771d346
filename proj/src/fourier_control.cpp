#include "fourierctl/fourier_control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "fourierctl/errors.hpp"

namespace fourierctl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kGoldenSectionTolerance = 1e-10;
constexpr std::size_t kMaxRefinedCandidates = 8;

/// Sum of amplitudes[2k] cos((k+1) w t) + amplitudes[2k+1] sin((k+1) w t),
/// using the angle-addition recurrence for the higher harmonics.
double harmonic_sum(std::span<const double> amplitudes, double omega, double t) {
  const double phase = omega * t;
  const double c1 = std::cos(phase);
  const double s1 = std::sin(phase);
  double ck = c1;
  double sk = s1;
  double sum = 0.0;
  const std::size_t harmonics = amplitudes.size() / 2;
  for (std::size_t k = 0; k < harmonics; ++k) {
    sum += amplitudes[2 * k] * ck + amplitudes[2 * k + 1] * sk;
    const double next_c = ck * c1 - sk * s1;
    sk = sk * c1 + ck * s1;
    ck = next_c;
  }
  return sum;
}

template <class F>
double golden_section_minimize(const F& f, double lo, double hi, double& argmin) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > kGoldenSectionTolerance) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  if (f1 <= f2) {
    argmin = x1;
    return f1;
  }
  argmin = x2;
  return f2;
}

struct SampleGrid {
  double start = 0.0;
  double spacing = 0.0;
  std::size_t count = 0;
  bool periodic = false;  // the grid covers one full period, indices wrap
  double lower = 0.0;     // clamp for refinement brackets when not periodic
  double upper = 0.0;
};

SampleGrid make_grid(double omega, double t0, double tf, std::size_t grid_points) {
  SampleGrid grid;
  grid.start = t0;
  grid.lower = t0;
  grid.upper = tf;
  const double horizon = tf - t0;
  const double period = kTwoPi / std::abs(omega);
  // 4096 samples per period, never fewer than grid_points in total.
  if (omega != 0.0 && std::isfinite(period) && period <= horizon) {
    grid.periodic = true;
    grid.count = std::max<std::size_t>(grid_points, 4096);
    grid.spacing = period / static_cast<double>(grid.count);
  } else {
    const double periods = omega == 0.0 ? 0.0 : horizon / period;
    const auto per_period = static_cast<std::size_t>(std::ceil(4096.0 * periods));
    grid.count = std::max(grid_points, per_period);
    grid.spacing = horizon / static_cast<double>(grid.count - 1);
  }
  return grid;
}

/// Minimum of f over the grid followed by golden-section refinement of the
/// lowest local minima. Returns the best value found.
template <class F>
double refined_minimum(const F& f, const SampleGrid& grid, const std::vector<double>& samples,
                       double range_hint) {
  const std::size_t n = samples.size();
  const double grid_min = *std::min_element(samples.begin(), samples.end());
  const double margin = 1e-3 * range_hint;

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    double left;
    double right;
    if (grid.periodic) {
      left = samples[(i + n - 1) % n];
      right = samples[(i + 1) % n];
    } else {
      left = i == 0 ? samples[i] : samples[i - 1];
      right = i + 1 == n ? samples[i] : samples[i + 1];
    }
    if (samples[i] <= left && samples[i] <= right && samples[i] <= grid_min + margin) {
      candidates.push_back(i);
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [&](std::size_t lhs, std::size_t rhs) { return samples[lhs] < samples[rhs]; });
  if (candidates.size() > kMaxRefinedCandidates) candidates.resize(kMaxRefinedCandidates);

  double best = grid_min;
  for (const std::size_t i : candidates) {
    const double centre = grid.start + grid.spacing * static_cast<double>(i);
    double lo = centre - grid.spacing;
    double hi = centre + grid.spacing;
    if (!grid.periodic) {
      lo = std::max(lo, grid.lower);
      hi = std::min(hi, grid.upper);
    }
    double argmin = centre;
    best = std::min(best, golden_section_minimize(f, lo, hi, argmin));
  }
  return best;
}

void require_unit(std::span<const double> direction, double tolerance) {
  double norm_sq = 0.0;
  for (const double v : direction) norm_sq += v * v;
  if (std::abs(std::sqrt(norm_sq) - 1.0) > tolerance) {
    std::ostringstream msg;
    msg << "shape direction must be a unit vector, |H| = " << std::sqrt(norm_sq);
    throw ContractViolation(msg.str());
  }
}

}  // namespace

void ControlShape::validate(double t0, double tf) const {
  if (harmonics < 1) throw ContractViolation("harmonic count must be positive");
  if (angles.size() != static_cast<std::size_t>(2 * harmonics - 1)) {
    throw ContractViolation("shape with K harmonics needs 2K-1 angles");
  }
  for (std::size_t i = 0; i + 1 < angles.size(); ++i) {
    if (!(angles[i] >= 0.0 && angles[i] <= kPi)) {
      throw ContractViolation("angle " + std::to_string(i) + " outside [0, pi]");
    }
  }
  if (!(angles.back() >= 0.0 && angles.back() < kTwoPi)) {
    throw ContractViolation("last angle outside [0, 2 pi)");
  }
  if (!(tf > t0)) throw ContractViolation("horizon must satisfy tf > t0");
  if (!(omega >= kTwoPi / (tf - t0))) {
    throw ContractViolation("omega below one period per horizon");
  }
}

void SpanParams::validate() const {
  if (!(p > 0.0 && p <= 1.0)) throw ContractViolation("span parameter p outside (0, 1]");
  if (!(q > 0.0 && q <= 1.0)) throw ContractViolation("span parameter q outside (0, 1]");
}

void ControlBounds::validate() const {
  if (!(lower < upper)) throw ContractViolation("control bounds need lower < upper");
}

double FourierControl::evaluate(double t) const {
  const double phase = omega * t;
  const double c1 = std::cos(phase);
  const double s1 = std::sin(phase);
  double ck = c1;
  double sk = s1;
  double sum = 0.5 * a0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t k = 0; k < n; ++k) {
    sum += a[k] * ck + b[k] * sk;
    const double next_c = ck * c1 - sk * s1;
    sk = sk * c1 + ck * s1;
    ck = next_c;
  }
  return sum;
}

FourierControl FourierControl::negated() const {
  FourierControl out = *this;
  out.a0 = -a0;
  for (double& v : out.a) v = -v;
  for (double& v : out.b) v = -v;
  return out;
}

double evaluate_control(const FourierControl& control, double t) { return control.evaluate(t); }

double TrigPolynomial::value(double t) const { return offset + harmonic_sum(amplitudes, omega, t); }

std::vector<double> direction_from_angles(std::span<const double> angles) {
  if (angles.empty() || angles.size() % 2 == 0) {
    throw DimensionError("hyperspherical angle count must be odd (2K-1), got " +
                         std::to_string(angles.size()));
  }
  std::vector<double> direction(angles.size() + 1);
  double running = 1.0;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    direction[i] = running * std::cos(angles[i]);
    running *= std::sin(angles[i]);
  }
  direction.back() = running;
  return direction;
}

double shape_value(std::span<const double> direction, double omega, double t) {
  if (direction.empty() || direction.size() % 2 != 0) {
    throw DimensionError("shape direction length must be 2K");
  }
  require_unit(direction, 1e-9);
  return harmonic_sum(direction, omega, t);
}

NormalizationResult normalize_shape(const TrigPolynomial& polynomial, double t0, double tf,
                                    std::size_t grid_points) {
  if (grid_points < 2) throw ContractViolation("normalization grid needs at least 2 points");
  if (!(tf > t0)) throw ContractViolation("normalization horizon needs tf > t0");
  if (polynomial.amplitudes.size() % 2 != 0) {
    throw DimensionError("polynomial amplitude length must be 2K");
  }

  const SampleGrid grid = make_grid(polynomial.omega, t0, tf, grid_points);
  std::vector<double> samples(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) {
    samples[i] = polynomial.value(grid.start + grid.spacing * static_cast<double>(i));
  }
  const auto [min_it, max_it] = std::minmax_element(samples.begin(), samples.end());
  const double grid_range = *max_it - *min_it;

  const auto value = [&](double t) { return polynomial.value(t); };
  const auto negated = [&](double t) { return -polynomial.value(t); };
  const double observed_min = refined_minimum(value, grid, samples, grid_range);
  for (double& s : samples) s = -s;
  const double observed_max = -refined_minimum(negated, grid, samples, grid_range);

  const double range = observed_max - observed_min;
  if (!(range >= kDegenerateShapeRange)) {
    std::ostringstream msg;
    msg << "shape has no variation on [" << t0 << ", " << tf << "]: max - min = " << range;
    throw DegenerateShape(msg.str());
  }

  NormalizationResult result;
  result.observed_min = observed_min;
  result.observed_max = observed_max;
  result.beta = 1.0 / range;
  result.alpha = -2.0 * observed_min / range;
  return result;
}

NormalizationResult normalize_shape(std::span<const double> direction, double omega, double t0,
                                    double tf, std::size_t grid_points) {
  TrigPolynomial polynomial;
  polynomial.amplitudes.assign(direction.begin(), direction.end());
  polynomial.omega = omega;
  return normalize_shape(polynomial, t0, tf, grid_points);
}

FourierControl apply_span(std::span<const double> direction, double omega,
                          const NormalizationResult& normalization, const SpanParams& span,
                          const ControlBounds& bounds) {
  if (direction.size() % 2 != 0) throw DimensionError("shape direction length must be 2K");
  const double width = bounds.upper - bounds.lower;
  const double floor = bounds.lower + span.p * (1.0 - span.q) * width;
  const double scale = width * span.p * span.q;

  FourierControl control;
  control.omega = omega;
  control.harmonics = static_cast<int>(direction.size() / 2);
  control.a0 = 2.0 * (floor + scale * 0.5 * normalization.alpha);
  control.a.resize(direction.size() / 2);
  control.b.resize(direction.size() / 2);
  const double amplitude_scale = scale * normalization.beta;
  for (std::size_t k = 0; k < control.a.size(); ++k) {
    control.a[k] = amplitude_scale * direction[2 * k];
    control.b[k] = amplitude_scale * direction[2 * k + 1];
  }
  return control;
}

FourierControl constant_span_control(int harmonics, double omega, const SpanParams& span,
                                     const ControlBounds& bounds) {
  const double width = bounds.upper - bounds.lower;
  FourierControl control;
  control.omega = omega;
  control.harmonics = harmonics;
  control.a0 = 2.0 * (bounds.lower + span.p * (1.0 - span.q) * width + 0.5 * width * span.p * span.q);
  control.a.assign(static_cast<std::size_t>(std::max(harmonics, 0)), 0.0);
  control.b.assign(static_cast<std::size_t>(std::max(harmonics, 0)), 0.0);
  return control;
}

FourierControl build_control(const ControlShape& shape, const SpanParams& span,
                             const ControlBounds& bounds, double t0, double tf,
                             std::size_t grid_points) {
  const std::vector<double> direction = direction_from_angles(shape.angles);
  try {
    const NormalizationResult normalization =
        normalize_shape(direction, shape.omega, t0, tf, grid_points);
    return apply_span(direction, shape.omega, normalization, span, bounds);
  } catch (const DegenerateShape&) {
    return constant_span_control(shape.harmonics, shape.omega, span, bounds);
  }
}

ControlShape extend_harmonics(const ControlShape& shape) {
  if (shape.harmonics < 1 || shape.angles.size() != static_cast<std::size_t>(2 * shape.harmonics - 1)) {
    throw DimensionError("extend_harmonics: shape needs 2K-1 angles");
  }
  ControlShape extended;
  extended.omega = shape.omega;
  extended.harmonics = shape.harmonics + 1;
  extended.angles = shape.angles;

  double& former_last = extended.angles.back();
  double bridge = 0.0;
  if (former_last > kPi) {
    former_last = kTwoPi - former_last;
    bridge = kPi;
  }
  extended.angles.push_back(bridge);
  extended.angles.push_back(0.0);
  return extended;
}

}  // namespace fourierctl
