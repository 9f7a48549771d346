#include "fourierctl/capsule_plant.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fourierctl/errors.hpp"

namespace fourierctl {

namespace {

ContactMode slip_mode_for(double direction) {
  return direction >= 0.0 ? ContactMode::SlipPositive : ContactMode::SlipNegative;
}

/// Quantities shared by every expression of the model at one state.
struct Kinematics {
  double s;   // sin theta
  double c;   // cos theta
  double w2;  // theta'^2
  double drive;  // sin theta - rho theta - nu theta' + u

  Kinematics(const CapsuleState& state, double u, const CapsuleParams& params)
      : s(std::sin(state.theta)),
        c(std::cos(state.theta)),
        w2(state.theta_dot * state.theta_dot),
        drive(s - params.rho * state.theta - params.nu * state.theta_dot + u) {}
};

Accelerations slip_accelerations(const Kinematics& k, const CapsuleParams& params, int sign,
                                 double theta) {
  const double mu_s = params.mu * static_cast<double>(sign);
  const double g1 = params.gamma + 1.0;

  // [ 1            -c ] [th'']   [ drive ]
  // [ -c - mu_s s  g1 ] [ z'' ] = [ rhs2  ]
  const double m12 = -k.c;
  const double m21 = -k.c - mu_s * k.s;
  const double rhs2 = -k.w2 * k.s - mu_s * g1 + mu_s * k.w2 * k.c;

  const double det = g1 - m12 * m21;
  if (!(std::abs(det) > 1e-12)) {
    std::ostringstream msg;
    msg << "singular slip dynamics at theta = " << theta << " (det = " << det << ")";
    throw SingularDynamics(msg.str());
  }
  return {(k.drive * g1 - m12 * rhs2) / det, (rhs2 - m21 * k.drive) / det};
}

double load(const Kinematics& k, double theta_ddot, const CapsuleParams& params) {
  return (params.gamma + 1.0) - theta_ddot * k.s - k.w2 * k.c;
}

double demand(const Kinematics& k, double theta_ddot) { return theta_ddot * k.c - k.w2 * k.s; }

}  // namespace

std::string_view to_string(ContactMode mode) {
  switch (mode) {
    case ContactMode::Stick:
      return "stick";
    case ContactMode::SlipPositive:
      return "slip_positive";
    case ContactMode::SlipNegative:
      return "slip_negative";
  }
  return "unknown";
}

ContactMode contact_mode_from_string(std::string_view name) {
  if (name == "stick") return ContactMode::Stick;
  if (name == "slip_positive") return ContactMode::SlipPositive;
  if (name == "slip_negative") return ContactMode::SlipNegative;
  throw std::invalid_argument("unknown contact mode: " + std::string(name));
}

int slip_sign(ContactMode mode) {
  switch (mode) {
    case ContactMode::SlipPositive:
      return 1;
    case ContactMode::SlipNegative:
      return -1;
    case ContactMode::Stick:
      break;
  }
  return 0;
}

void CapsuleParams::validate() const {
  if (!(mu >= 0.0)) throw ContractViolation("capsule parameter mu must be >= 0");
  if (!(rho >= 0.0)) throw ContractViolation("capsule parameter rho must be >= 0");
  if (!(nu >= 0.0)) throw ContractViolation("capsule parameter nu must be >= 0");
  if (!(gamma > 0.0)) throw ContractViolation("capsule parameter gamma must be > 0");
}

Accelerations stick_derivative(const CapsuleState& state, double u, const CapsuleParams& params) {
  const double th = state.theta;
  return {std::sin(th) - params.rho * th - params.nu * state.theta_dot + u, 0.0};
}

Accelerations slip_derivative(const CapsuleState& state, double u, const CapsuleParams& params,
                              int sign) {
  return slip_accelerations(Kinematics(state, u, params), params, sign, state.theta);
}

double contact_load(const CapsuleState& state, double theta_ddot, const CapsuleParams& params) {
  const double th = state.theta;
  return (params.gamma + 1.0) - theta_ddot * std::sin(th) -
         state.theta_dot * state.theta_dot * std::cos(th);
}

double tangential_demand(const CapsuleState& state, double theta_ddot) {
  const double th = state.theta;
  return theta_ddot * std::cos(th) - state.theta_dot * state.theta_dot * std::sin(th);
}

FrictionResult friction_force(const CapsuleState& state, double r_y, double r_z,
                              const CapsuleParams& params) {
  if (state.z_dot != 0.0) {
    const double direction = state.z_dot > 0.0 ? 1.0 : -1.0;
    return {params.mu * r_y * direction, slip_mode_for(direction)};
  }
  const double limit = params.mu * r_y;
  if (std::abs(r_z) >= limit) {
    const double direction = r_z >= 0.0 ? 1.0 : -1.0;
    return {limit * direction, slip_mode_for(direction)};
  }
  return {r_z, ContactMode::Stick};
}

double stick_break_event(const CapsuleState& state, double u, const CapsuleParams& params) {
  const Kinematics k(state, u, params);
  return params.mu * load(k, k.drive, params) - std::abs(demand(k, k.drive));
}

double slip_stop_event(const CapsuleState& state) { return state.z_dot; }

ContactMode resolve_rest_mode(const CapsuleState& state, double u, const CapsuleParams& params) {
  CapsuleState at_rest = state;
  at_rest.z_dot = 0.0;
  const double th_dd = stick_derivative(at_rest, u, params).theta_ddot;
  return friction_force(at_rest, contact_load(at_rest, th_dd, params),
                        tangential_demand(at_rest, th_dd), params)
      .mode;
}

Accelerations mode_derivative(const CapsuleState& state, double u, const CapsuleParams& params) {
  if (state.mode == ContactMode::Stick) return stick_derivative(state, u, params);
  return slip_derivative(state, u, params, slip_sign(state.mode));
}

ContactForces contact_forces(const CapsuleState& state, double u, const CapsuleParams& params) {
  const Accelerations acc = mode_derivative(state, u, params);
  ContactForces forces;
  forces.r_y = contact_load(state, acc.theta_ddot, params);
  forces.r_z = tangential_demand(state, acc.theta_ddot);
  if (state.mode == ContactMode::Stick) {
    forces.f_z = forces.r_z;
  } else {
    forces.f_z = params.mu * forces.r_y * static_cast<double>(slip_sign(state.mode));
  }
  return forces;
}

CapsulePlant::CapsulePlant(const CapsuleParams& params) : params_(params) { params_.validate(); }

CapsuleState CapsulePlant::to_capsule_state(const State& y, int mode) {
  return {y[0], y[1], y[2], y[3], static_cast<ContactMode>(mode)};
}

CapsulePlant::State CapsulePlant::to_vector(const CapsuleState& state) {
  return {state.theta, state.theta_dot, state.z, state.z_dot};
}

CapsulePlant::State CapsulePlant::derivative(int mode, double /*t*/, const State& y, double u) const {
  if (mode == static_cast<int>(ContactMode::Stick)) {
    return {y[1], std::sin(y[0]) - params_.rho * y[0] - params_.nu * y[1] + u, y[3], 0.0};
  }
  const CapsuleState state = to_capsule_state(y, mode);
  const Accelerations acc =
      slip_accelerations(Kinematics(state, u, params_), params_, slip_sign(state.mode), y[0]);
  return {y[1], acc.theta_ddot, y[3], acc.z_ddot};
}

std::size_t CapsulePlant::event_count(int /*mode*/) const { return 1; }

double CapsulePlant::event_value(int mode, std::size_t /*event*/, double /*t*/, const State& y,
                                 double u) const {
  const CapsuleState state = to_capsule_state(y, mode);
  if (state.mode == ContactMode::Stick) return stick_break_event(state, u, params_);
  return static_cast<double>(slip_sign(state.mode)) * slip_stop_event(state);
}

ModeTransition<4> CapsulePlant::transition(int mode, std::size_t /*event*/, double /*t*/,
                                           const State& y, double u) const {
  CapsuleState state = to_capsule_state(y, mode);
  if (state.mode == ContactMode::Stick) {
    // Sliding starts in the direction of the tangential demand.
    const double th_dd = stick_derivative(state, u, params_).theta_ddot;
    const double r_z = tangential_demand(state, th_dd);
    return {static_cast<int>(slip_mode_for(r_z)), y};
  }
  state.z_dot = 0.0;
  const ContactMode next = resolve_rest_mode(state, u, params_);
  return {static_cast<int>(next), to_vector(state)};
}

bool CapsulePlant::flag_state(int mode, double /*t*/, const State& y, double u) const {
  const CapsuleState state = to_capsule_state(y, mode);
  const Kinematics k(state, u, params_);
  const double th_dd = state.mode == ContactMode::Stick
                           ? k.drive
                           : slip_accelerations(k, params_, slip_sign(state.mode), y[0]).theta_ddot;
  return load(k, th_dd, params_) <= 0.0;
}

}  // namespace fourierctl
