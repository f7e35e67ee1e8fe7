#pragma once

#include <algorithm>
#include <cmath>

#include "twintrack/params.hpp"

namespace twintrack::drivetrain {

/// Combined wheel and e-motor losses: viscous plus smoothed Coulomb term.
/// Odd in omega, zero at standstill.
inline double resistive_torque(double omega, const DrivetrainParams& p) {
    return -p.viscous * omega - p.coulomb * std::tanh(omega / p.coulomb_width);
}

/// Wheel rotational dynamics. fx_reaction is the road reaction on the
/// wheel: the negative of the traction force propelling the body, so
/// positive traction decelerates the wheel.
inline double wheel_acceleration(double tau, double fx_reaction, double omega,
                                 const DrivetrainParams& p) {
    return (tau + fx_reaction * p.wheel_radius + resistive_torque(omega, p)) / p.inertia;
}

inline double clamp_torque(double tau_ref, const DrivetrainParams& p) {
    return std::clamp(tau_ref, p.torque_min, p.torque_max);
}

/// First-order actuator lag; tau_ref must already be clamped.
inline double actuator_lag_derivative(double tau, double tau_ref, double time_constant) {
    return (tau_ref - tau) / time_constant;
}

}  // namespace twintrack::drivetrain
