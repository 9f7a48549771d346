/**
 * @file fourier_control.hpp
 * @brief Bounded truncated-Fourier-series controls parametrized by shape and span.
 *
 * A scalar control on [t0, tf] is written as
 *
 *   u(t) = a0/2 + sum_{k=1..K} a_k cos(k w t) + b_k sin(k w t).
 *
 * Its *shape* is the unit direction of the amplitude vector
 * H = [a_1, b_1, ..., a_K, b_K] (encoded by 2K-1 hyperspherical angles),
 * together with w and K. Its *span* is where the range of u sits inside the
 * admissible interval [m, M]; two numbers p, q in (0, 1] select any
 * subinterval [m + p(1-q)(M-m), m + p(M-m)]. Every (angles, w, p, q) therefore
 * maps to an admissible control, which is what makes the control problem a
 * box-constrained parameter search.
 */
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fourierctl {

/// Default number of grid samples used to bracket the extrema of a shape.
inline constexpr std::size_t kDefaultNormalizationGrid = 8192;

/// Differences max-min below this are treated as a constant shape.
inline constexpr double kDegenerateShapeRange = 1e-12;

/// Shape of one control channel: hyperspherical angles, fundamental frequency
/// and harmonic count. `angles` has 2K-1 entries; all but the last lie in
/// [0, pi], the last in [0, 2 pi).
struct ControlShape {
  std::vector<double> angles;
  double omega = 1.0;
  int harmonics = 1;

  /// Throws ContractViolation if the invariants do not hold. The frequency
  /// must be at least one full period per horizon, 2 pi / (tf - t0).
  void validate(double t0, double tf) const;
};

/// Placement of the control range inside [m, M].
struct SpanParams {
  double p = 1.0;
  double q = 1.0;

  void validate() const;
};

/// Admissible control interval [lower, upper].
struct ControlBounds {
  double lower = -4.0;
  double upper = 4.0;

  void validate() const;
};

/// Evaluable truncated Fourier series in coefficient form.
struct FourierControl {
  double a0 = 0.0;
  std::vector<double> a;  ///< cosine amplitudes, a[k-1] multiplies cos(k w t)
  std::vector<double> b;  ///< sine amplitudes, b[k-1] multiplies sin(k w t)
  double omega = 1.0;
  int harmonics = 0;

  [[nodiscard]] double evaluate(double t) const;

  /// Coefficient-wise negation; the resulting control is -u(t).
  [[nodiscard]] FourierControl negated() const;
};

/// Free-standing form of FourierControl::evaluate.
[[nodiscard]] double evaluate_control(const FourierControl& control, double t);

/// offset + amplitudes . [cos(w t), sin(w t), ..., cos(K w t), sin(K w t)].
/// With offset 0 and unit amplitudes this is the raw shape polynomial.
struct TrigPolynomial {
  double offset = 0.0;
  std::vector<double> amplitudes;
  double omega = 1.0;

  [[nodiscard]] double value(double t) const;
  [[nodiscard]] int harmonics() const { return static_cast<int>(amplitudes.size() / 2); }
};

/// Affine map that rescales a polynomial p(t) onto [0, 1]:
/// u_bar(t) = alpha/2 + beta * p(t).
struct NormalizationResult {
  double alpha = 0.0;
  double beta = 1.0;
  double observed_min = 0.0;
  double observed_max = 0.0;

  [[nodiscard]] double apply(double raw_value) const { return 0.5 * alpha + beta * raw_value; }
};

/// Unit vector of length 2K from 2K-1 hyperspherical angles:
/// H_1 = cos(phi_1), H_i = sin(phi_1)...sin(phi_{i-1}) cos(phi_i),
/// H_2K = sin(phi_1)...sin(phi_{2K-1}).
/// Throws DimensionError unless the angle count is odd and positive.
[[nodiscard]] std::vector<double> direction_from_angles(std::span<const double> angles);

/// direction . [cos(w t), sin(w t), ..., cos(K w t), sin(K w t)] with
/// K = direction.size() / 2. The direction must be a unit vector (1e-9).
[[nodiscard]] double shape_value(std::span<const double> direction, double omega, double t);

/**
 * @brief Finds alpha, beta such that alpha/2 + beta * p(t) spans exactly [0, 1] on [t0, tf].
 *
 * Extrema are bracketed on a uniform grid of at least @p grid_points samples
 * and refined by golden-section search to 1e-10 in t. When the horizon holds
 * at least one fundamental period the grid covers a single period starting
 * at t0, since the polynomial repeats.
 *
 * Throws DegenerateShape when max - min < 1e-12.
 */
[[nodiscard]] NormalizationResult normalize_shape(const TrigPolynomial& polynomial, double t0,
                                                  double tf,
                                                  std::size_t grid_points = kDefaultNormalizationGrid);

[[nodiscard]] NormalizationResult normalize_shape(std::span<const double> direction, double omega,
                                                  double t0, double tf,
                                                  std::size_t grid_points = kDefaultNormalizationGrid);

/// Coefficients of m + p(1-q)(M-m) + u_bar(t) (M-m) p q, where u_bar is the
/// normalized shape described by `direction`, `omega` and `normalization`.
[[nodiscard]] FourierControl apply_span(std::span<const double> direction, double omega,
                                        const NormalizationResult& normalization,
                                        const SpanParams& span, const ControlBounds& bounds);

/// Same span map applied to a constant u_bar = 0.5; used when the shape
/// carries no variation on the horizon.
[[nodiscard]] FourierControl constant_span_control(int harmonics, double omega,
                                                   const SpanParams& span,
                                                   const ControlBounds& bounds);

/// shape -> direction -> normalization -> span. A degenerate shape falls back
/// to constant_span_control so the map stays total.
[[nodiscard]] FourierControl build_control(const ControlShape& shape, const SpanParams& span,
                                           const ControlBounds& bounds, double t0, double tf,
                                           std::size_t grid_points = kDefaultNormalizationGrid);

/**
 * @brief Adds one harmonic without changing the control.
 *
 * The first 2K-2 angles are kept. The former last angle phi moves from
 * [0, 2 pi) into [0, pi]: if phi <= pi it stays and the new angle is 0,
 * otherwise it becomes 2 pi - phi and the new angle is pi (cos(pi) restores
 * the sign of sin(phi)). The final new angle is 0, so the two added
 * amplitudes are zero and direction_from_angles reproduces the old vector.
 */
[[nodiscard]] ControlShape extend_harmonics(const ControlShape& shape);

}  // namespace fourierctl
