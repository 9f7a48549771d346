#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "fourierctl/errors.hpp"
#include "fourierctl/fourier_control.hpp"
#include "support/generators.hpp"

namespace fourierctl {
namespace {

using testing::Gen;
using testing::kPi;
using testing::kTwoPi;

constexpr double kT0 = 0.0;
constexpr double kTf = 100.0;
const double kOmegaMin = kTwoPi / (kTf - kT0);

/// Independent hyperspherical product, written out per component.
std::vector<double> product_formula(const std::vector<double>& phi) {
  std::vector<double> h(phi.size() + 1);
  for (std::size_t i = 0; i < h.size(); ++i) {
    double v = 1.0;
    for (std::size_t j = 0; j < i; ++j) v *= std::sin(phi[j]);
    if (i < phi.size()) v *= std::cos(phi[i]);
    h[i] = v;
  }
  return h;
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x * x;
  return std::sqrt(s);
}

std::pair<double, double> sampled_range(const FourierControl& c, double t0, double tf, int n) {
  double lo = c.evaluate(t0);
  double hi = lo;
  for (int i = 1; i <= n; ++i) {
    const double v = c.evaluate(t0 + (tf - t0) * i / n);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

TEST(DirectionFromAngles, SingleHarmonicExamples) {
  const auto a = direction_from_angles(std::vector<double>{0.0});
  EXPECT_DOUBLE_EQ(a[0], 1.0);
  EXPECT_DOUBLE_EQ(a[1], 0.0);
  const auto b = direction_from_angles(std::vector<double>{kPi / 2});
  EXPECT_NEAR(b[0], 0.0, 1e-15);
  EXPECT_NEAR(b[1], 1.0, 1e-15);
}

TEST(DirectionFromAngles, TwoHarmonicExample) {
  const auto h = direction_from_angles(std::vector<double>{kPi / 2, kPi / 2, 0.0});
  const std::vector<double> expected{0.0, 0.0, 1.0, 0.0};
  ASSERT_EQ(h.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(h[i], expected[i], 1e-15);
}

TEST(DirectionFromAngles, RejectsEvenAngleCount) {
  EXPECT_THROW((void)direction_from_angles(std::vector<double>{0.1, 0.2}), DimensionError);
  EXPECT_THROW((void)direction_from_angles(std::vector<double>{}), DimensionError);
}

TEST(DirectionFromAngles, MatchesProductFormulaAndHasUnitNorm) {
  Gen gen(11);
  for (int draw = 0; draw < 500; ++draw) {
    const int k = gen.integer(1, 12);
    const auto phi = gen.angles(k);
    const auto h = direction_from_angles(phi);
    const auto ref = product_formula(phi);
    ASSERT_EQ(h.size(), static_cast<std::size_t>(2 * k));
    for (std::size_t i = 0; i < h.size(); ++i) EXPECT_NEAR(h[i], ref[i], 1e-14);
    EXPECT_NEAR(norm(h), 1.0, 1e-12);
  }
}

TEST(ShapeValue, Examples) {
  EXPECT_DOUBLE_EQ(shape_value(std::vector<double>{1.0, 0.0}, 1.0, 0.0), 1.0);
  EXPECT_NEAR(shape_value(std::vector<double>{0.0, 1.0}, 2.0, kPi / 4), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(shape_value(std::vector<double>{0.6, 0.8}, 1.0, 0.0), 0.6);
}

TEST(ShapeValue, RejectsNonUnitDirection) {
  EXPECT_THROW((void)shape_value(std::vector<double>{1.0, 1.0}, 1.0, 0.0), ContractViolation);
}

TEST(ShapeValue, MatchesDirectSum) {
  Gen gen(12);
  for (int draw = 0; draw < 200; ++draw) {
    const int k = gen.integer(1, 10);
    const auto h = direction_from_angles(gen.angles(k));
    const double omega = gen.uniform(kOmegaMin, 10.0);
    const double t = gen.uniform(0.0, 100.0);
    double expected = 0.0;
    for (int j = 1; j <= k; ++j) {
      expected += h[2 * j - 2] * std::cos(j * omega * t) + h[2 * j - 1] * std::sin(j * omega * t);
    }
    EXPECT_NEAR(shape_value(h, omega, t), expected, 1e-11);
  }
}

TEST(NormalizeShape, FullPeriodCosine) {
  const auto r = normalize_shape(std::vector<double>{1.0, 0.0}, kOmegaMin, 0.0, 100.0);
  EXPECT_NEAR(r.observed_min, -1.0, 1e-12);
  EXPECT_NEAR(r.observed_max, 1.0, 1e-12);
  EXPECT_NEAR(r.beta, 0.5, 1e-12);
  EXPECT_NEAR(r.alpha, 1.0, 1e-12);
}

TEST(NormalizeShape, HalfPeriodSine) {
  const auto r = normalize_shape(std::vector<double>{0.0, 1.0}, kOmegaMin, 0.0, 50.0);
  EXPECT_NEAR(r.observed_min, 0.0, 1e-12);
  EXPECT_NEAR(r.observed_max, 1.0, 1e-12);
  EXPECT_NEAR(r.beta, 1.0, 1e-12);
  EXPECT_NEAR(r.alpha, 0.0, 1e-12);
}

TEST(NormalizeShape, DegenerateShapeThrows) {
  TrigPolynomial flat;
  flat.offset = 3.0;
  flat.amplitudes = {0.0, 0.0, 0.0, 0.0};
  flat.omega = 1.0;
  EXPECT_THROW((void)normalize_shape(flat, 0.0, 100.0), DegenerateShape);
}

TEST(NormalizeShape, RejectsBadArguments) {
  const std::vector<double> h{1.0, 0.0};
  EXPECT_THROW((void)normalize_shape(h, 1.0, 0.0, 100.0, 1), ContractViolation);
  EXPECT_THROW((void)normalize_shape(h, 1.0, 5.0, 5.0), ContractViolation);
}

TEST(NormalizeShape, RangeIsUnitOnDenseGrid) {
  Gen gen(13);
  for (int draw = 0; draw < 50; ++draw) {
    const int k = gen.integer(1, 8);
    const auto h = direction_from_angles(gen.angles(k));
    const double omega = gen.uniform(kOmegaMin, 10.0);
    const auto r = normalize_shape(h, omega, kT0, kTf);
    EXPECT_GT(r.beta, 0.0);
    double lo = 1e9;
    double hi = -1e9;
    for (int i = 0; i <= 200000; ++i) {
      const double v = r.apply(shape_value(h, omega, kTf * i / 200000.0));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    EXPECT_GT(lo, -1e-9);
    EXPECT_LT(hi, 1.0 + 1e-9);
    EXPECT_NEAR(lo, 0.0, 1e-6);
    EXPECT_NEAR(hi, 1.0, 1e-6);
  }
}

TEST(NormalizeShape, InvariantUnderShiftAndPositiveScale) {
  Gen gen(14);
  for (int draw = 0; draw < 100; ++draw) {
    const int k = gen.integer(1, 8);
    const auto h = direction_from_angles(gen.angles(k));
    const double omega = gen.uniform(kOmegaMin, 10.0);
    TrigPolynomial raw{0.0, h, omega};
    const double shift = gen.uniform(-50.0, 50.0);
    const double scale = gen.uniform(0.01, 100.0);
    TrigPolynomial moved{shift, h, omega};
    for (double& v : moved.amplitudes) v *= scale;

    const auto a = normalize_shape(raw, kT0, kTf);
    const auto b = normalize_shape(moved, kT0, kTf);
    for (int i = 0; i < 100; ++i) {
      const double t = gen.uniform(kT0, kTf);
      EXPECT_NEAR(a.apply(raw.value(t)), b.apply(moved.value(t)), 1e-10);
    }
  }
}

TEST(ApplySpan, FullSpanReachesBounds) {
  const std::vector<double> h{1.0, 0.0};
  const auto n = normalize_shape(h, kOmegaMin, kT0, kTf);
  const auto c = apply_span(h, kOmegaMin, n, SpanParams{1.0, 1.0}, ControlBounds{-4.0, 4.0});
  const auto [lo, hi] = sampled_range(c, kT0, kTf, 100000);
  EXPECT_NEAR(lo, -4.0, 1e-9);
  EXPECT_NEAR(hi, 4.0, 1e-9);
}

TEST(ApplySpan, HalfSpanExample) {
  const std::vector<double> h{1.0, 0.0};
  const auto n = normalize_shape(h, kOmegaMin, kT0, kTf);
  const auto c = apply_span(h, kOmegaMin, n, SpanParams{0.5, 0.5}, ControlBounds{-4.0, 4.0});
  const auto [lo, hi] = sampled_range(c, kT0, kTf, 100000);
  EXPECT_NEAR(lo, -2.0, 1e-9);
  EXPECT_NEAR(hi, 0.0, 1e-9);
}

TEST(ApplySpan, VanishingQGivesConstantAtUpperEnd) {
  const std::vector<double> h{0.6, 0.8};
  const auto n = normalize_shape(h, 1.0, kT0, kTf);
  const auto c = apply_span(h, 1.0, n, SpanParams{1.0, 1e-12}, ControlBounds{-4.0, 4.0});
  const auto [lo, hi] = sampled_range(c, kT0, kTf, 10000);
  EXPECT_NEAR(lo, 4.0, 1e-10);
  EXPECT_NEAR(hi, 4.0, 1e-10);
}

TEST(EvaluateControl, Examples) {
  FourierControl zero;
  zero.a = {0.0, 0.0};
  zero.b = {0.0, 0.0};
  EXPECT_EQ(evaluate_control(zero, 3.7), 0.0);

  FourierControl offset;
  offset.a0 = 2.0;
  EXPECT_DOUBLE_EQ(evaluate_control(offset, 42.0), 1.0);

  FourierControl cosine;
  cosine.a0 = 0.5;
  cosine.a = {1.0};
  cosine.b = {0.0};
  cosine.omega = kPi;
  EXPECT_NEAR(evaluate_control(cosine, 1.0), -1.0 + 0.25, 1e-15);
}

TEST(EvaluateControl, MatchesDirectSumAndNegation) {
  Gen gen(15);
  for (int draw = 0; draw < 200; ++draw) {
    FourierControl c;
    const int k = gen.integer(1, 10);
    c.harmonics = k;
    c.a0 = gen.uniform(-3.0, 3.0);
    c.omega = gen.uniform(0.05, 10.0);
    for (int j = 0; j < k; ++j) {
      c.a.push_back(gen.uniform(-1.0, 1.0));
      c.b.push_back(gen.uniform(-1.0, 1.0));
    }
    const double t = gen.uniform(0.0, 100.0);
    double expected = 0.5 * c.a0;
    for (int j = 1; j <= k; ++j) {
      expected += c.a[j - 1] * std::cos(j * c.omega * t) + c.b[j - 1] * std::sin(j * c.omega * t);
    }
    EXPECT_NEAR(c.evaluate(t), expected, 1e-11);
    EXPECT_DOUBLE_EQ(c.negated().evaluate(t), -c.evaluate(t));
  }
}

TEST(ExtendHarmonics, KeepBranchExample) {
  const ControlShape s{{kPi / 3}, 1.0, 1};
  const ControlShape e = extend_harmonics(s);
  EXPECT_EQ(e.harmonics, 2);
  EXPECT_EQ(e.omega, 1.0);
  ASSERT_EQ(e.angles.size(), 3u);
  EXPECT_EQ(e.angles[0], kPi / 3);
  EXPECT_EQ(e.angles[1], 0.0);
  EXPECT_EQ(e.angles[2], 0.0);
  const auto h = direction_from_angles(e.angles);
  EXPECT_NEAR(h[0], 0.5, 1e-15);
  EXPECT_NEAR(h[1], std::sqrt(3.0) / 2.0, 1e-15);
  EXPECT_EQ(h[2], 0.0);
  EXPECT_EQ(h[3], 0.0);
}

TEST(ExtendHarmonics, ReflectionBranchExample) {
  const ControlShape s{{3 * kPi / 2}, 1.0, 1};
  const ControlShape e = extend_harmonics(s);
  ASSERT_EQ(e.angles.size(), 3u);
  EXPECT_NEAR(e.angles[0], kPi / 2, 1e-15);
  EXPECT_EQ(e.angles[1], kPi);
  EXPECT_EQ(e.angles[2], 0.0);
  const auto h = direction_from_angles(e.angles);
  EXPECT_NEAR(h[0], 0.0, 1e-15);
  EXPECT_NEAR(h[1], -1.0, 1e-15);
  EXPECT_NEAR(h[2], 0.0, 1e-15);
  EXPECT_NEAR(h[3], 0.0, 1e-15);
}

TEST(ExtendHarmonics, ExtendedShapeIsValid) {
  Gen gen(16);
  for (int draw = 0; draw < 200; ++draw) {
    const ControlShape s = gen.shape(gen.integer(1, 9), kOmegaMin, 10.0);
    const ControlShape e = extend_harmonics(s);
    EXPECT_NO_THROW(e.validate(kT0, kTf));
    for (std::size_t i = 0; i + 2 < s.angles.size(); ++i) EXPECT_EQ(e.angles[i], s.angles[i]);
  }
}

TEST(ExtendHarmonics, PreservesAmplitudesAndShapeValues) {
  Gen gen(17);
  for (int draw = 0; draw < 200; ++draw) {
    const ControlShape s = gen.shape(gen.integer(1, 9), kOmegaMin, 10.0);
    const ControlShape e = extend_harmonics(s);
    const auto h = direction_from_angles(s.angles);
    const auto he = direction_from_angles(e.angles);
    for (std::size_t i = 0; i < h.size(); ++i) EXPECT_NEAR(he[i], h[i], 1e-12);
    EXPECT_NEAR(he[h.size()], 0.0, 1e-12);
    EXPECT_NEAR(he[h.size() + 1], 0.0, 1e-12);
    for (int i = 0; i < 1000; ++i) {
      const double t = gen.uniform(kT0, kTf);
      EXPECT_NEAR(shape_value(he, e.omega, t), shape_value(h, s.omega, t), 1e-10);
    }
  }
}

TEST(BuildControl, ExtensionIsPointwiseExact) {
  Gen gen(18);
  const ControlBounds bounds{-4.0, 4.0};
  for (int draw = 0; draw < 60; ++draw) {
    const ControlShape s = gen.shape(gen.integer(1, 9), kOmegaMin, 10.0);
    const SpanParams span = gen.span();
    const FourierControl a = build_control(s, span, bounds, kT0, kTf);
    const FourierControl b = build_control(extend_harmonics(s), span, bounds, kT0, kTf);
    EXPECT_EQ(b.harmonics, a.harmonics + 1);
    for (int i = 0; i <= 2000; ++i) {
      const double t = kTf * i / 2000.0;
      EXPECT_NEAR(b.evaluate(t), a.evaluate(t), 1e-10);
    }
  }
}

TEST(BuildControl, RangeStaysInsideBounds) {
  Gen gen(19);
  const ControlBounds bounds{-4.0, 4.0};
  for (int draw = 0; draw < 60; ++draw) {
    const ControlShape s = gen.shape(gen.integer(1, 10), kOmegaMin, 10.0);
    const SpanParams span = gen.span();
    const FourierControl c = build_control(s, span, bounds, kT0, kTf);
    const auto [lo, hi] = sampled_range(c, kT0, kTf, 200000);
    EXPECT_GE(lo, bounds.lower - 1e-6);
    EXPECT_LE(hi, bounds.upper + 1e-6);
    const double width = bounds.upper - bounds.lower;
    EXPECT_NEAR(hi, bounds.lower + span.p * width, 1e-6);
    EXPECT_NEAR(lo, bounds.lower + span.p * (1.0 - span.q) * width, 1e-6);
  }
}

TEST(BuildControl, ConstantSpanFallbackIsMidpointOfSpan) {
  const FourierControl c = constant_span_control(3, 1.0, SpanParams{0.5, 0.5}, ControlBounds{-4.0, 4.0});
  EXPECT_EQ(c.harmonics, 3);
  EXPECT_DOUBLE_EQ(c.evaluate(12.3), -1.0);
}

TEST(ControlShape, ValidateChecksInvariants) {
  EXPECT_NO_THROW((ControlShape{{0.5, 0.5, 6.0}, 1.0, 2}.validate(kT0, kTf)));
  EXPECT_THROW((ControlShape{{0.5, 0.5}, 1.0, 2}.validate(kT0, kTf)), ContractViolation);
  EXPECT_THROW((ControlShape{{4.0, 0.5, 1.0}, 1.0, 2}.validate(kT0, kTf)), ContractViolation);
  EXPECT_THROW((ControlShape{{0.5, 0.5, kTwoPi}, 1.0, 2}.validate(kT0, kTf)), ContractViolation);
  EXPECT_THROW((ControlShape{{0.5}, 0.01, 1}.validate(kT0, kTf)), ContractViolation);
  EXPECT_THROW((SpanParams{0.0, 0.5}.validate()), ContractViolation);
  EXPECT_THROW((SpanParams{0.5, 1.5}.validate()), ContractViolation);
  EXPECT_THROW((ControlBounds{4.0, -4.0}.validate()), ContractViolation);
}

}  // namespace
}  // namespace fourierctl
