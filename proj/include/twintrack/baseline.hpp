#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>

#include "twintrack/controller.hpp"
#include "twintrack/errors.hpp"
#include "twintrack/params.hpp"
#include "twintrack/tire.hpp"
#include "twintrack/vehicle.hpp"

namespace twintrack {

/// One step of the direct least-squares traction-force allocation used as
/// the state-of-the-art comparison. The weighting minimizes the per-wheel
/// normalized force (a proxy for slip), subject to total-force and
/// yaw-moment equality constraints.
struct AllocationProblem {
    double f_total = 0.0;  // N
    double m_z = 0.0;      // N m
    std::array<double, kNumWheels> fz{};
    std::array<double, kNumWheels> mu{};
    std::array<double, kNumWheels> r_y{};  // m, wheel lateral positions
    double d_x = 1.0;                      // longitudinal Pacejka D (capacity bound)
};

struct AllocationResult {
    std::array<double, kNumWheels> fx{};
    double residual_force = 0.0;   // constraint violation after clamping
    double residual_moment = 0.0;
    bool clamped = false;
};

namespace baseline {

/// Closed-form weighted minimum-norm solution of
///   min sum_i (Fx_i / (mu_i Fz_i))^2
///   s.t. sum Fx_i = F_total, sum (-r_y_i) Fx_i = M_z,
/// followed by a per-wheel clamp to the friction-capacity bound. The
/// clamp is deliberately not re-solved (no limit handling); set
/// reallocate to iterate the clamping for fairness studies.
inline AllocationResult allocate_least_squares(const AllocationProblem& prob,
                                               bool reallocate = false) {
    using Mat24 = Eigen::Matrix<double, 2, kNumWheels>;
    Eigen::Vector2d demand(prob.f_total, prob.m_z);

    std::array<bool, kNumWheels> active{true, true, true, true};
    AllocationResult res;
    for (int pass = 0; pass < (reallocate ? kNumWheels : 1); ++pass) {
        Mat24 a = Mat24::Zero();
        Eigen::Vector4d w = Eigen::Vector4d::Zero();
        int n_active = 0;
        for (int i = 0; i < kNumWheels; ++i) {
            if (!active[i]) continue;
            a(0, i) = 1.0;
            a(1, i) = -prob.r_y[i];
            const double cap = prob.mu[i] * prob.fz[i];
            w(i) = cap * cap;
            ++n_active;
        }
        if (n_active < 2) throw AllocationInfeasible("allocate_least_squares: fewer than two usable wheels");

        const Eigen::Matrix2d gram = a * w.asDiagonal() * a.transpose();
        if (std::abs(gram.determinant()) < 1e-9 * (1.0 + gram.norm() * gram.norm()))
            throw AllocationInfeasible("allocate_least_squares: rank-deficient constraint matrix");

        Eigen::Vector2d adj = demand;
        for (int i = 0; i < kNumWheels; ++i) {
            if (active[i]) continue;
            adj(0) -= res.fx[i];
            adj(1) -= -prob.r_y[i] * res.fx[i];
        }
        const Eigen::Vector4d fx = w.asDiagonal() * a.transpose() * gram.inverse() * adj;

        bool newly_clamped = false;
        for (int i = 0; i < kNumWheels; ++i) {
            if (!active[i]) continue;
            const double bound = prob.mu[i] * prob.fz[i] * prob.d_x;
            double v = fx(i);
            if (std::abs(v) > bound) {
                v = std::copysign(bound, v);
                res.clamped = true;
                if (reallocate) {
                    active[i] = false;
                    newly_clamped = true;
                }
            }
            res.fx[i] = v;
        }
        if (!newly_clamped) break;
    }

    double sum_f = 0.0, sum_m = 0.0;
    for (int i = 0; i < kNumWheels; ++i) {
        sum_f += res.fx[i];
        sum_m += -prob.r_y[i] * res.fx[i];
    }
    res.residual_force = sum_f - prob.f_total;
    res.residual_moment = sum_m - prob.m_z;
    return res;
}

/// Open-loop force-to-torque inversion via the bilinear slip-curve
/// approximation. No slip feedback: this is the structural weakness the
/// comparison exposes.
inline double force_to_torque(double fx, double fz, double mu, double vx,
                              const TireParams& tp, const DrivetrainParams& dp) {
    const double c_lambda = tire::linear_tire_stiffness(tp);
    const double cap = std::max(mu * fz * c_lambda, 1e-9);
    const double lambda_est = fx / cap;
    const double omega_est =
        vx > 0.0 ? vx * (1.0 + std::max(lambda_est, 0.0)) / dp.wheel_radius
                 : 0.0;
    return fx * dp.wheel_radius - drivetrain::resistive_torque(omega_est, dp);
}

struct BaselineGains {
    double vel_kp = 1.5;     // CP velocity P (self-driving mode)
    double yaw_kp = 4000.0;  // yaw-moment PI on yaw-rate error
    double yaw_ki = 8000.0;
    double ts = 0.01;
};

struct BaselineState {
    double yaw_integ = 0.0;
    std::array<double, kNumWheels> tau_ref{};
};

/// Full baseline controller step. Receives the true wheel loads and the
/// nominal friction (perfect knowledge of the signals the method needs),
/// but not the eps disturbances.
inline std::array<double, kNumWheels> baseline_update(
    const MotionReference& refs, const Measurements& meas,
    const std::array<double, kNumWheels>& loads,
    const std::array<double, kNumWheels>& mu, const PlantParams& p,
    const BaselineGains& g, BaselineState& st, bool reallocate = false) {
    const double a_cmd = refs.mode == DriveMode::SelfDriving
                             ? g.vel_kp * (refs.v_ref - meas.v.x())
                             : refs.a_ref;
    const double speed = std::hypot(meas.v.x(), meas.v.y());
    const double drag = 0.5 * p.vehicle.drag_coeff * p.vehicle.air_density *
                        p.vehicle.frontal_area * speed * meas.v.x();

    const double yaw_err = refs.yaw_rate_ref - meas.omega.z();
    st.yaw_integ += g.yaw_ki * g.ts * yaw_err;

    AllocationProblem prob;
    prob.f_total = p.vehicle.mass * a_cmd + drag;
    prob.m_z = g.yaw_kp * yaw_err + st.yaw_integ;
    prob.fz = loads;
    prob.mu = mu;
    for (int i = 0; i < kNumWheels; ++i) prob.r_y[i] = p.vehicle.wheel_pos[i].y();
    prob.d_x = p.tire.longitudinal.d;

    const AllocationResult alloc = allocate_least_squares(prob, reallocate);
    for (int i = 0; i < kNumWheels; ++i) {
        st.tau_ref[i] = drivetrain::clamp_torque(
            force_to_torque(alloc.fx[i], loads[i], mu[i], meas.v.x(), p.tire,
                            p.drivetrain),
            p.drivetrain);
    }
    return st.tau_ref;
}

}  // namespace baseline
}  // namespace twintrack
