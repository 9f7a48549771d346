/**
 * @file capsule_plant.hpp
 * @brief Dimensionless pendulum capsule drive with Coulomb stick-slip friction.
 *
 * State (theta, theta', z, z') in dimensionless time tau. The pendulum and
 * capsule are coupled through
 *
 *   [ 1        -cos th ] [th'']   [ sin th - rho th - nu th' + u ]
 *   [ -cos th  gamma+1 ] [ z'' ] = [ -th'^2 sin th - f_z          ]
 *
 * with normal load r_y = (gamma+1) - th'' sin th - th'^2 cos th, tangential
 * demand r_z = th'' cos th - th'^2 sin th and friction
 *
 *   f_z = mu r_y sgn(z')      if z' != 0
 *         mu r_y sgn(r_z)     if z' = 0 and |r_z| >= mu r_y
 *         r_z                 if |r_z| < mu r_y  (stick)
 *
 * The dimensional model is scaled with Omega = sqrt(g/l), tau = Omega t,
 * gamma = M/m, z = x/l, rho = k/(m Omega^2 l^2), nu = c/(m Omega l^2), and
 * forces/torque divided by m Omega^2 l (resp. m Omega^2 l^2); primes are
 * derivatives in tau (x' = x_dot / Omega).
 */
#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "fourierctl/hybrid_integrator.hpp"

namespace fourierctl {

enum class ContactMode : int { Stick = 0, SlipPositive = 1, SlipNegative = 2 };

[[nodiscard]] std::string_view to_string(ContactMode mode);
/// Throws std::invalid_argument for unknown names.
[[nodiscard]] ContactMode contact_mode_from_string(std::string_view name);
/// +1 for SlipPositive, -1 for SlipNegative, 0 for Stick.
[[nodiscard]] int slip_sign(ContactMode mode);

struct CapsuleParams {
  double mu = 0.3;      ///< friction coefficient
  double rho = 2.5;     ///< spring stiffness
  double nu = 1.0;      ///< damping
  double gamma = 10.0;  ///< capsule-to-pendulum mass ratio

  void validate() const;
};

struct CapsuleState {
  double theta = 0.0;
  double theta_dot = 0.0;
  double z = 0.0;
  double z_dot = 0.0;
  ContactMode mode = ContactMode::Stick;
};

struct Accelerations {
  double theta_ddot = 0.0;
  double z_ddot = 0.0;
};

struct ContactForces {
  double r_y = 0.0;
  double r_z = 0.0;
  double f_z = 0.0;
};

struct FrictionResult {
  double f_z = 0.0;
  ContactMode mode = ContactMode::Stick;
};

/// Pendulum acceleration with the capsule held (z'' = 0).
[[nodiscard]] Accelerations stick_derivative(const CapsuleState& state, double u,
                                             const CapsuleParams& params);

/// Accelerations while sliding in direction `sign` (+1 or -1), with kinetic
/// friction mu r_y sign substituted into the equations of motion. Throws
/// SingularDynamics if the resulting 2x2 system is singular.
[[nodiscard]] Accelerations slip_derivative(const CapsuleState& state, double u,
                                            const CapsuleParams& params, int sign);

[[nodiscard]] double contact_load(const CapsuleState& state, double theta_ddot,
                                  const CapsuleParams& params);
[[nodiscard]] double tangential_demand(const CapsuleState& state, double theta_ddot);

/// Three-branch Coulomb law. The tie |r_z| = mu r_y at z' = 0 starts sliding.
[[nodiscard]] FrictionResult friction_force(const CapsuleState& state, double r_y, double r_z,
                                            const CapsuleParams& params);

/// mu r_y - |r_z| evaluated with the stick accelerations; stick holds while positive.
[[nodiscard]] double stick_break_event(const CapsuleState& state, double u,
                                       const CapsuleParams& params);

/// z'; its zero crossing ends a slip arc.
[[nodiscard]] double slip_stop_event(const CapsuleState& state);

/// Mode at zero capsule velocity according to the friction law.
[[nodiscard]] ContactMode resolve_rest_mode(const CapsuleState& state, double u,
                                            const CapsuleParams& params);

/// Accelerations of the state's own mode.
[[nodiscard]] Accelerations mode_derivative(const CapsuleState& state, double u,
                                            const CapsuleParams& params);

/// r_y, r_z and f_z consistent with the state's own mode.
[[nodiscard]] ContactForces contact_forces(const CapsuleState& state, double u,
                                           const CapsuleParams& params);

/**
 * @brief The capsule as a three-mode hybrid system.
 *
 * Stick has one event (stick break, leads to sliding in the direction of
 * r_z). Each slip mode has one event, sign * z' (slip stop); at its zero the
 * velocity is snapped to exactly 0 and the friction law decides between
 * stick and sliding in the direction of r_z. Steps with r_y <= 0 (liftoff,
 * not modelled) are flagged, not altered.
 */
class CapsulePlant final : public HybridSystem<4> {
 public:
  explicit CapsulePlant(const CapsuleParams& params = {});

  [[nodiscard]] const CapsuleParams& params() const { return params_; }

  State derivative(int mode, double t, const State& y, double u) const override;
  std::size_t event_count(int mode) const override;
  double event_value(int mode, std::size_t event, double t, const State& y, double u) const override;
  ModeTransition<4> transition(int mode, std::size_t event, double t, const State& y,
                               double u) const override;
  bool flag_state(int mode, double t, const State& y, double u) const override;

  [[nodiscard]] static CapsuleState to_capsule_state(const State& y, int mode);
  [[nodiscard]] static State to_vector(const CapsuleState& state);

 private:
  CapsuleParams params_;
};

}  // namespace fourierctl
