#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "twintrack/errors.hpp"
#include "twintrack/params.hpp"
#include "twintrack/tire.hpp"
#include "twintrack/transform.hpp"
#include "twintrack/vehicle.hpp"

namespace twintrack {

struct ControllerGains {
    // slip PID (torque command)
    double slip_kp = 9000.0;
    double slip_ki = 200000.0;
    double slip_kd = 25.0;
    double slip_nf = 100.0;  // derivative filter coefficient, Tf = 1/nf
    // acceleration PI (slip-ratio command)
    double accel_kp = 0.002;
    double accel_ki = 0.06;
    // wheel pivot velocity P (acceleration command)
    double vel_kp = 1.5;

    double ts = 0.01;          // s, controller sample time
    double lambda_max = 0.11;  // slip safety limit
    double zeta = 2.0;         // m/s, vehicle-level low-speed cutoff
    double theta = 0.9;        // traction-limit trigger fraction of lambda_max
    double hysteresis = 0.05;  // release hysteresis fraction of lambda_max

    void validate() const {
        if (!(ts > 0.0)) throw std::invalid_argument("ControllerGains: ts must be > 0");
        if (!(lambda_max > 0.0 && lambda_max < 1.0))
            throw std::invalid_argument("ControllerGains: lambda_max must be in (0, 1)");
        if (!(zeta > 0.0)) throw std::invalid_argument("ControllerGains: zeta must be > 0");
    }
};

/// Gains shipped with the reference parameter set. Not taken from any
/// publication; tuned against the shipped plant. lambda_max is pinned to
/// the slip-curve peak of the given tire.
inline ControllerGains default_gains(const TireParams& tire) {
    ControllerGains g;
    g.lambda_max = tire::slip_curve_peak(tire, 1.0, 1.0).first;
    return g;
}

/// CP and wheel measurements consumed by the controller each sample.
struct Measurements {
    Vec3 v = Vec3::Zero();      // CP velocity, body frame
    Vec3 omega = Vec3::Zero();  // CP angular rates
    double ax = 0.0;            // d(v_x)/dt at CP
    double yaw_accel = 0.0;     // rad/s^2
    std::array<double, kNumWheels> wheel_speed{};

    bool finite() const {
        bool ok = v.allFinite() && omega.allFinite() && std::isfinite(ax) &&
                  std::isfinite(yaw_accel);
        for (double w : wheel_speed) ok = ok && std::isfinite(w);
        return ok;
    }
};

struct SlipPidState {
    double integ = 0.0;
    double deriv = 0.0;
    double prev_meas = 0.0;
    bool primed = false;  // first sample after reset skips the derivative kick

    void reset() { *this = SlipPidState{}; }
};

struct ControllerState {
    std::array<SlipPidState, kNumWheels> slip{};
    std::array<double, kNumWheels> accel_integ{};
    bool limit_latched = false;

    // last commanded values and internals, kept for arbitration and tracing
    std::array<double, kNumWheels> lambda_ref{};
    std::array<double, kNumWheels> a_ref_wheel{};
    std::array<double, kNumWheels> a_lat{};
    std::array<double, kNumWheels> tau_ref{};
    double a_cp_cmd = 0.0;
    bool launch_active = false;

    void reset_loops() {
        for (auto& s : slip) s.reset();
        accel_integ.fill(0.0);
        lambda_ref.fill(0.0);
    }
};

namespace controller {

/// Positional discrete PID with filtered derivative on the measurement
/// and conditional-integration anti-windup. Output clamped to
/// [out_min, out_max]; the integrator freezes while pushing further into
/// the active limit.
inline double slip_pid_step(double ref, double meas, SlipPidState& st,
                            const ControllerGains& g, double out_min, double out_max) {
    const double e = ref - meas;
    const double tf = 1.0 / g.slip_nf;
    if (!st.primed) {
        st.prev_meas = meas;
        st.primed = true;
    }
    st.deriv = (tf * st.deriv - g.slip_kd * (meas - st.prev_meas)) / (tf + g.ts);
    st.prev_meas = meas;

    const double integ_cand = st.integ + g.slip_ki * g.ts * e;
    const double u_cand = g.slip_kp * e + integ_cand + st.deriv;
    const bool push_hi = u_cand > out_max && e > 0.0;
    const bool push_lo = u_cand < out_min && e < 0.0;
    if (!push_hi && !push_lo) st.integ = integ_cand;
    const double u = g.slip_kp * e + st.integ + st.deriv;
    return std::clamp(u, out_min, out_max);
}

/// Discrete PI generating the slip-ratio command, clamped to
/// [-lambda_max, lambda_max] with the same anti-windup scheme. The clamp
/// is the hook observed by the traction-limit arbitration.
inline double accel_pi_step(double ref, double meas, double& integ,
                            const ControllerGains& g) {
    const double e = ref - meas;
    const double cand = integ + g.accel_ki * g.ts * e;
    const double u_cand = g.accel_kp * e + cand;
    const bool push_hi = u_cand > g.lambda_max && e > 0.0;
    const bool push_lo = u_cand < -g.lambda_max && e < 0.0;
    if (!push_hi && !push_lo) integ = cand;
    return std::clamp(g.accel_kp * e + integ, -g.lambda_max, g.lambda_max);
}

inline double velocity_p_step(double v_ref, double v_meas, const ControllerGains& g) {
    return g.vel_kp * (v_ref - v_meas);
}

/// One controller sample: transforms CP references and measurements to
/// the wheel pivots, runs the velocity-P / accel-PI / slip-PID hierarchy
/// with traction-limit arbitration, and returns per-wheel torque
/// commands. Below the zeta vehicle-speed threshold the slip loop is
/// bypassed by an open-loop launch torque proportional to the CP
/// acceleration demand.
inline std::array<double, kNumWheels> controller_update(const MotionReference& refs,
                                                        const Measurements& meas,
                                                        const PlantParams& p,
                                                        const ControllerGains& g,
                                                        ControllerState& st) {
    if (!meas.finite()) {
        st.tau_ref.fill(0.0);
        throw ControllerFault("controller_update: non-finite measurement");
    }

    const double gamma = refs.gamma;
    const Vec3 omega_ref(0.0, 0.0, refs.yaw_rate_ref);

    // velocity layer: CP acceleration demand plus per-wheel lateral correction
    std::array<double, kNumWheels> a_lat{};
    double a_cp = 0.0;
    if (refs.mode == DriveMode::SelfDriving) {
        // acceleration feedforward removes the steady ramp-following error
        // of the pure P velocity loop
        const double a_fb = velocity_p_step(refs.v_ref, meas.v.x(), g);
        a_cp = refs.a_ref + a_fb;
        for (int i = 0; i < kNumWheels; ++i) {
            const Vec3& r = p.vehicle.wheel_pos[i];
            const double vx_ref = transform::cp_to_wheel_velocity(
                                      Vec3(refs.v_ref, 0.0, 0.0), omega_ref, r, gamma)
                                      .x();
            const double vx_meas =
                transform::cp_to_wheel_velocity(meas.v, meas.omega, r, gamma).x();
            a_lat[i] = velocity_p_step(vx_ref, vx_meas, g) - a_fb;
        }
    } else {
        a_cp = refs.a_ref;
        for (int i = 0; i < kNumWheels; ++i) {
            const Vec3& r = p.vehicle.wheel_pos[i];
            const double rot_ref = transform::cp_to_wheel_velocity_driver(omega_ref, r, gamma);
            // like-for-like feedback: rotational component of the measured
            // wheel pivot velocity (measured v^{b_i} minus measured v^v)
            const double rot_meas =
                transform::cp_to_wheel_velocity(meas.v, meas.omega, r, gamma).x() -
                meas.v.x();
            a_lat[i] = velocity_p_step(rot_ref, rot_meas, g);
        }
    }
    st.a_cp_cmd = a_cp;
    st.a_lat = a_lat;

    // launch guard: slip control needs nonzero pivot speeds
    if (meas.v.norm() <= g.zeta) {
        st.reset_loops();
        st.launch_active = true;
        const double tau = drivetrain::clamp_torque(
            p.vehicle.mass * a_cp / kNumWheels * p.drivetrain.wheel_radius, p.drivetrain);
        st.tau_ref.fill(tau);
        st.a_ref_wheel.fill(a_cp);
        return st.tau_ref;
    }
    if (st.launch_active) {
        st.reset_loops();
        st.launch_active = false;
    }

    // traction-limit arbitration on the previously commanded slip ratios
    st.a_ref_wheel = transform::traction_limit_adjust(a_cp, a_lat, st.lambda_ref,
                                                      g.lambda_max, g.theta,
                                                      st.limit_latched, g.hysteresis);

    for (int i = 0; i < kNumWheels; ++i) {
        const Vec3& r = p.vehicle.wheel_pos[i];
        // acceleration measurement via the same (gamma-augmented) transform
        const double a_meas = meas.ax - (1.0 + gamma) * meas.yaw_accel * r.y() -
                              meas.omega.z() * meas.omega.z() * r.x();
        st.lambda_ref[i] =
            accel_pi_step(st.a_ref_wheel[i], a_meas, st.accel_integ[i], g);

        // slip measurement uses the physical (gamma = 0) kinematics
        const Vec3 v_pivot =
            transform::cp_to_wheel_velocity(meas.v, meas.omega, r, 0.0);
        const auto [vxw, vyw] =
            transform::wheel_frame_velocity(v_pivot, model::steer_angle(i, refs.delta));
        const double circ = meas.wheel_speed[i] * p.tire.wheel_radius;
        const double denom = std::max(std::abs(circ), std::abs(vxw));
        const double lambda_meas =
            denom > model::kSlipGuard
                ? tire::slip_ratio(meas.wheel_speed[i], p.tire.wheel_radius, vxw)
                : 0.0;

        st.tau_ref[i] = slip_pid_step(st.lambda_ref[i], lambda_meas, st.slip[i], g,
                                      p.drivetrain.torque_min, p.drivetrain.torque_max);
    }
    return st.tau_ref;
}

}  // namespace controller
}  // namespace twintrack
