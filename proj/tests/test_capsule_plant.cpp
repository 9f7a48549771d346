#include <gtest/gtest.h>

#include <cmath>

#include "fourierctl/capsule_plant.hpp"
#include "fourierctl/errors.hpp"
#include "support/friction_oracle.hpp"
#include "support/generators.hpp"

namespace fourierctl {
namespace {

using testing::Gen;
using testing::oracle_forces;

const CapsuleParams kParams{};

TEST(CapsuleParams, ReferenceDefaults) {
  EXPECT_EQ(kParams.mu, 0.3);
  EXPECT_EQ(kParams.rho, 2.5);
  EXPECT_EQ(kParams.nu, 1.0);
  EXPECT_EQ(kParams.gamma, 10.0);
  EXPECT_THROW((CapsuleParams{-0.1, 2.5, 1.0, 10.0}.validate()), ContractViolation);
  EXPECT_THROW((CapsuleParams{0.3, 2.5, 1.0, 0.0}.validate()), ContractViolation);
}

TEST(ContactMode, StringRoundTrip) {
  for (const ContactMode m : {ContactMode::Stick, ContactMode::SlipPositive, ContactMode::SlipNegative}) {
    EXPECT_EQ(contact_mode_from_string(to_string(m)), m);
  }
  EXPECT_EQ(to_string(ContactMode::SlipNegative), "slip_negative");
  EXPECT_THROW((void)contact_mode_from_string("sliding"), std::invalid_argument);
}

TEST(StickDerivative, RestWithZeroControlIsEquilibrium) {
  const CapsuleState rest{};
  const Accelerations a = stick_derivative(rest, 0.0, kParams);
  EXPECT_EQ(a.theta_ddot, 0.0);
  EXPECT_EQ(a.z_ddot, 0.0);
  EXPECT_GT(stick_break_event(rest, 0.0, kParams), 0.0);
  const ContactForces f = contact_forces(rest, 0.0, kParams);
  EXPECT_EQ(f.r_y, kParams.gamma + 1.0);
  EXPECT_EQ(f.r_z, 0.0);
  EXPECT_EQ(f.f_z, 0.0);
}

TEST(StickDerivative, MatchesOracle) {
  Gen gen(21);
  for (int i = 0; i < 2000; ++i) {
    const CapsuleState s = gen.state(ContactMode::Stick);
    const double u = gen.uniform(-4.0, 4.0);
    const auto o = oracle_forces(s, u, kParams, ContactMode::Stick);
    const Accelerations a = stick_derivative(s, u, kParams);
    EXPECT_NEAR(a.theta_ddot, o.theta_ddot, 1e-12);
    EXPECT_EQ(a.z_ddot, 0.0);
    EXPECT_NEAR(contact_load(s, a.theta_ddot, kParams), o.r_y, 1e-12);
    EXPECT_NEAR(tangential_demand(s, a.theta_ddot), o.r_z, 1e-12);
  }
}

TEST(SlipDerivative, MatchesOracleAndKineticFriction) {
  Gen gen(22);
  for (const ContactMode mode : {ContactMode::SlipPositive, ContactMode::SlipNegative}) {
    for (int i = 0; i < 2000; ++i) {
      const CapsuleState s = gen.state(mode);
      const double u = gen.uniform(-4.0, 4.0);
      const auto o = oracle_forces(s, u, kParams, mode);
      const Accelerations a = slip_derivative(s, u, kParams, slip_sign(mode));
      EXPECT_NEAR(a.theta_ddot, o.theta_ddot, 1e-12);
      EXPECT_NEAR(a.z_ddot, o.z_ddot, 1e-12);
      const ContactForces f = contact_forces(s, u, kParams);
      EXPECT_NEAR(f.r_y, o.r_y, 1e-12);
      EXPECT_NEAR(f.f_z, kParams.mu * f.r_y * slip_sign(mode), 1e-12);
      EXPECT_NEAR(f.f_z, o.f_z, 1e-12);
    }
  }
}

TEST(SlipDerivative, SignSymmetry) {
  Gen gen(23);
  for (int i = 0; i < 1000; ++i) {
    CapsuleState s = gen.state(ContactMode::SlipPositive);
    const double u = gen.uniform(-4.0, 4.0);
    CapsuleState mirrored = s;
    mirrored.theta = -s.theta;
    mirrored.theta_dot = -s.theta_dot;
    mirrored.z_dot = -s.z_dot;
    mirrored.mode = ContactMode::SlipNegative;
    const Accelerations a = slip_derivative(s, u, kParams, 1);
    const Accelerations b = slip_derivative(mirrored, -u, kParams, -1);
    EXPECT_NEAR(b.theta_ddot, -a.theta_ddot, 1e-12);
    EXPECT_NEAR(b.z_ddot, -a.z_ddot, 1e-12);
  }
}

TEST(SlipDerivative, SingularSystemThrows) {
  CapsuleParams p{2.0, 2.5, 1.0, 0.01};
  const auto det = [&](double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return (p.gamma + 1.0) - c * (c + p.mu * s);
  };
  double lo = 0.0;
  double hi = std::numbers::pi / 4;
  ASSERT_GT(det(lo), 0.0);
  ASSERT_LT(det(hi), 0.0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (det(mid) > 0.0 ? lo : hi) = mid;
  }
  CapsuleState s;
  s.theta = lo;
  s.z_dot = 1.0;
  EXPECT_THROW((void)slip_derivative(s, 0.0, p, 1), SingularDynamics);
}

TEST(FrictionForce, ThreeBranches) {
  CapsuleState moving;
  moving.z_dot = -0.5;
  const FrictionResult kinetic = friction_force(moving, 10.0, 1.0, kParams);
  EXPECT_EQ(kinetic.mode, ContactMode::SlipNegative);
  EXPECT_DOUBLE_EQ(kinetic.f_z, -3.0);

  CapsuleState rest;
  const FrictionResult breakaway = friction_force(rest, 10.0, -4.0, kParams);
  EXPECT_EQ(breakaway.mode, ContactMode::SlipNegative);
  EXPECT_DOUBLE_EQ(breakaway.f_z, -3.0);

  const FrictionResult held = friction_force(rest, 10.0, 2.0, kParams);
  EXPECT_EQ(held.mode, ContactMode::Stick);
  EXPECT_DOUBLE_EQ(held.f_z, 2.0);
}

TEST(FrictionForce, TieStartsSliding) {
  CapsuleState rest;
  const FrictionResult tie = friction_force(rest, 10.0, 3.0, kParams);
  EXPECT_EQ(tie.mode, ContactMode::SlipPositive);
  EXPECT_DOUBLE_EQ(tie.f_z, 3.0);
}

TEST(CapsulePlant, TransitionsFollowFrictionLaw) {
  const CapsulePlant plant;
  // Stick break with a large positive torque: r_z > 0 at theta = 0.
  const CapsulePlant::State y{0.0, 0.0, 1.0, 0.0};
  const auto to_slip = plant.transition(0, 0, 0.0, y, 4.0);
  EXPECT_EQ(to_slip.mode, static_cast<int>(ContactMode::SlipPositive));
  EXPECT_EQ(to_slip.state, y);
  const auto to_slip_neg = plant.transition(0, 0, 0.0, y, -4.0);
  EXPECT_EQ(to_slip_neg.mode, static_cast<int>(ContactMode::SlipNegative));

  // Slip stop with no drive sticks, with the velocity snapped to zero.
  const CapsulePlant::State stopping{0.0, 0.0, 2.0, 1e-13};
  const auto to_stick = plant.transition(1, 0, 0.0, stopping, 0.0);
  EXPECT_EQ(to_stick.mode, static_cast<int>(ContactMode::Stick));
  EXPECT_EQ(to_stick.state[3], 0.0);
  EXPECT_EQ(to_stick.state[2], 2.0);

  // Slip stop under a strong drive reverses into the opposite slip.
  const auto reverse = plant.transition(1, 0, 0.0, stopping, -4.0);
  EXPECT_EQ(reverse.mode, static_cast<int>(ContactMode::SlipNegative));
}

TEST(CapsulePlant, EventValuesArePositiveInsideModes) {
  const CapsulePlant plant;
  EXPECT_GT(plant.event_value(0, 0, 0.0, {0.0, 0.0, 0.0, 0.0}, 0.0), 0.0);
  EXPECT_LT(plant.event_value(0, 0, 0.0, {0.0, 0.0, 0.0, 0.0}, 4.0), 0.0);
  EXPECT_GT(plant.event_value(1, 0, 0.0, {0.0, 0.0, 0.0, 0.3}, 0.0), 0.0);
  EXPECT_GT(plant.event_value(2, 0, 0.0, {0.0, 0.0, 0.0, -0.3}, 0.0), 0.0);
  EXPECT_LT(plant.event_value(2, 0, 0.0, {0.0, 0.0, 0.0, 0.3}, 0.0), 0.0);
}

TEST(CapsulePlant, DerivativeAgreesWithFreeFunctions) {
  const CapsulePlant plant;
  Gen gen(24);
  for (const ContactMode mode : {ContactMode::Stick, ContactMode::SlipPositive, ContactMode::SlipNegative}) {
    for (int i = 0; i < 500; ++i) {
      const CapsuleState s = gen.state(mode);
      const double u = gen.uniform(-4.0, 4.0);
      const auto d = plant.derivative(static_cast<int>(mode), 0.0, CapsulePlant::to_vector(s), u);
      const Accelerations a = mode_derivative(s, u, kParams);
      EXPECT_EQ(d[0], s.theta_dot);
      EXPECT_EQ(d[2], s.z_dot);
      EXPECT_NEAR(d[1], a.theta_ddot, 1e-14);
      EXPECT_NEAR(d[3], a.z_ddot, 1e-14);
    }
  }
}

TEST(CapsulePlant, FlagsNonPositiveContactLoad) {
  const CapsulePlant plant;
  EXPECT_FALSE(plant.flag_state(0, 0.0, {0.0, 0.0, 0.0, 0.0}, 0.0));
  // theta' large at theta = 0 pulls the capsule off the ground (r_y = 11 - theta'^2).
  EXPECT_TRUE(plant.flag_state(0, 0.0, {0.0, 4.0, 0.0, 0.0}, 0.0));
}

}  // namespace
}  // namespace fourierctl
