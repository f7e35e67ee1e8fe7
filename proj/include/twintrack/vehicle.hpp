#pragma once

#include <array>
#include <cmath>

#include "twintrack/drivetrain.hpp"
#include "twintrack/errors.hpp"
#include "twintrack/params.hpp"
#include "twintrack/tire.hpp"
#include "twintrack/transform.hpp"

namespace twintrack {

/// Full continuous plant state. Pose is integrated for trace output only
/// and is never fed back into control.
struct VehicleState {
    Vec3 v = Vec3::Zero();      // m/s, CP velocity, body frame
    Vec3 omega = Vec3::Zero();  // rad/s, CP angular rate, body frame
    std::array<double, kNumWheels> wheel_speed{};  // rad/s
    std::array<double, kNumWheels> torque{};       // N m, actual actuator output
    Vec3 pose = Vec3::Zero();   // x, y (m, inertial), yaw (rad)

    double yaw_rate() const { return omega.z(); }

    bool finite() const {
        bool ok = v.allFinite() && omega.allFinite() && pose.allFinite();
        for (int i = 0; i < kNumWheels; ++i)
            ok = ok && std::isfinite(wheel_speed[i]) && std::isfinite(torque[i]);
        return ok;
    }
};

/// Commands held constant over one plant step (zero-order hold).
struct PlantInput {
    std::array<double, kNumWheels> tau_ref{};
    double delta = 0.0;  // rad, applied to both front wheels
};

struct ForceMoment {
    Vec3 force = Vec3::Zero();
    Vec3 moment = Vec3::Zero();
};

struct WheelLoadSet {
    std::array<double, kNumWheels> fz{};
};

namespace model {

/// Aerodynamic and rolling resistance lumped force, already signed to
/// oppose planar motion, applied at the aero center.
inline ForceMoment aero_resistance(const VehicleState& s, const VehicleParams& p) {
    const double speed = std::hypot(s.v.x(), s.v.y());
    ForceMoment fm;
    fm.force = -0.5 * p.drag_coeff * p.air_density * p.frontal_area * speed *
               Vec3(s.v.x(), s.v.y(), 0.0);
    fm.moment = p.aero_center.cross(fm.force);
    return fm;
}

/// Quasi-static normal-load distribution: static share from the CG
/// position plus longitudinal and lateral transfer from the measured CP
/// acceleration. Loads are clamped at zero.
inline WheelLoadSet normal_loads(const VehicleState& /*s*/, const Vec3& accel_cp,
                                 const VehicleParams& p) {
    const double weight = p.mass * p.gravity;
    const double xf = 0.5 * (p.wheel_pos[0].x() + p.wheel_pos[1].x());
    const double xr = 0.5 * (p.wheel_pos[2].x() + p.wheel_pos[3].x());
    const double wheelbase = xf - xr;
    const double front_total = weight * (-xr) / wheelbase;
    const double rear_total = weight * xf / wheelbase;

    WheelLoadSet out;
    for (int i = 0; i < kNumWheels; ++i) {
        const double axle_total = is_front(i) ? front_total : rear_total;
        // side split within the axle from the y geometry
        const int mate = is_left(i) ? i + 1 : i - 1;
        const double span = std::abs(p.wheel_pos[i].y() - p.wheel_pos[mate].y());
        const double share = std::abs(p.wheel_pos[mate].y()) / span;
        double fz = axle_total * share;

        // longitudinal transfer: positive a_x loads the rear axle
        const double d_long = p.mass * accel_cp.x() * p.cg_height / (2.0 * wheelbase);
        fz += is_front(i) ? -d_long : d_long;

        // lateral transfer: positive a_y (leftwards) unloads the left side
        const double track = is_front(i) ? p.track_front() : p.track_rear();
        const double d_lat = p.mass * accel_cp.y() * p.cg_height / (2.0 * track);
        fz += is_left(i) ? -d_lat : d_lat;

        out.fz[i] = std::max(fz, 0.0);
    }
    return out;
}

/// Total force/moment at the CP: wheel contributions (pivot frames are
/// identity-oriented w.r.t. the body), gravity, and aero resistance.
inline ForceMoment sum_wheel_forces(const std::array<Vec3, kNumWheels>& wheel_forces,
                                    const VehicleState& s, const VehicleParams& p) {
    ForceMoment fm = aero_resistance(s, p);
    fm.force += Vec3(0.0, 0.0, -p.mass * p.gravity);
    for (int i = 0; i < kNumWheels; ++i) {
        fm.force += wheel_forces[i];
        fm.moment += p.wheel_pos[i].cross(wheel_forces[i]);
    }
    return fm;
}

/// Newton-Euler equations at the CP given the total force/moment.
inline std::pair<Vec3, Vec3> rigid_body_derivatives(const VehicleState& s,
                                                    const ForceMoment& fm,
                                                    const VehicleParams& p) {
    const Vec3 dv = fm.force / p.mass - s.omega.cross(s.v);
    const Vec3 domega =
        p.inertia.ldlt().solve(fm.moment - s.omega.cross(p.inertia * s.omega));
    return {dv, domega};
}

/// Per-wheel tire outputs at one plant evaluation.
struct WheelDiag {
    WheelLoadSet loads;
    std::array<double, kNumWheels> lambda{};
    std::array<double, kNumWheels> alpha{};
    std::array<double, kNumWheels> fx_wheel{};  // wheel frame, after ellipse
    std::array<double, kNumWheels> fy_wheel{};
    std::array<Vec3, kNumWheels> pivot_force;   // pivot (body-oriented) frame
};

inline double steer_angle(int wheel, double delta) {
    return is_front(wheel) ? delta : 0.0;
}

// Guard below which slip variables are treated as zero inside the plant;
// the controller applies its own (much larger) low-speed policy.
inline constexpr double kSlipGuard = 1e-6;

inline WheelDiag tire_forces(const VehicleState& s, double delta,
                             const WheelLoadSet& loads, const TireInterfaceState& iface,
                             const PlantParams& p) {
    WheelDiag d;
    d.loads = loads;
    for (int i = 0; i < kNumWheels; ++i) {
        const double di = steer_angle(i, delta);
        const Vec3 v_pivot =
            transform::cp_to_wheel_velocity(s.v, s.omega, p.vehicle.wheel_pos[i], 0.0);
        const auto [vxw, vyw] = transform::wheel_frame_velocity(v_pivot, di);

        const double circ = s.wheel_speed[i] * p.tire.wheel_radius;
        const double denom = std::max(std::abs(circ), std::abs(vxw));
        const double lambda =
            denom > kSlipGuard ? tire::slip_ratio(s.wheel_speed[i], p.tire.wheel_radius, vxw)
                               : 0.0;
        const double alpha =
            std::abs(vxw) > kSlipGuard ? tire::slip_angle(vxw, vyw) : 0.0;

        const double fx_raw =
            tire::pacejka_longitudinal(lambda, loads.fz[i], iface.mu[i], iface.eps[i], p.tire);
        double fy_raw = tire::pacejka_lateral(alpha, loads.fz[i], iface.mu[i], p.tire);
        if (p.epsilon_scales_lateral) fy_raw *= iface.eps[i];
        const auto [fx, fy] =
            tire::friction_ellipse(fx_raw, fy_raw, loads.fz[i], iface.mu[i], p.tire);

        d.lambda[i] = lambda;
        d.alpha[i] = alpha;
        d.fx_wheel[i] = fx;
        d.fy_wheel[i] = fy;
        const double c = std::cos(di), sn = std::sin(di);
        d.pivot_force[i] = Vec3(fx * c - fy * sn, fx * sn + fy * c, 0.0);
    }
    return d;
}

struct PlantDerivs {
    Vec3 dv = Vec3::Zero();
    Vec3 domega = Vec3::Zero();
    std::array<double, kNumWheels> dwheel_speed{};
    std::array<double, kNumWheels> dtorque{};
    Vec3 dpose = Vec3::Zero();
    WheelDiag diag;
    Vec3 accel_cp = Vec3::Zero();  // specific planar acceleration used for load transfer
};

/// Full coupled plant derivative. Normal loads are resolved by a short
/// fixed-point iteration (loads -> forces -> acceleration -> loads), which
/// keeps the evaluation a pure function of the state.
inline PlantDerivs evaluate(const VehicleState& s, const PlantInput& u,
                            const TireInterfaceState& iface, const PlantParams& p) {
    Vec3 accel = Vec3::Zero();
    WheelLoadSet loads;
    WheelDiag diag;
    for (int iter = 0; iter < 3; ++iter) {
        loads = normal_loads(s, accel, p.vehicle);
        diag = tire_forces(s, u.delta, loads, iface, p);
        Vec3 planar = aero_resistance(s, p.vehicle).force;
        for (const auto& f : diag.pivot_force) planar += f;
        accel = Vec3(planar.x() / p.vehicle.mass, planar.y() / p.vehicle.mass, 0.0);
    }

    const ForceMoment fm = sum_wheel_forces(diag.pivot_force, s, p.vehicle);
    auto [dv, domega] = rigid_body_derivatives(s, fm, p.vehicle);
    // flat-road planar constraint: heave, roll, and pitch DOFs are not modeled
    dv.z() = 0.0;
    domega.x() = 0.0;
    domega.y() = 0.0;

    PlantDerivs d;
    d.dv = dv;
    d.domega = domega;
    for (int i = 0; i < kNumWheels; ++i) {
        d.dwheel_speed[i] = drivetrain::wheel_acceleration(
            s.torque[i], -diag.fx_wheel[i], s.wheel_speed[i], p.drivetrain);
        d.dtorque[i] = drivetrain::actuator_lag_derivative(
            s.torque[i], drivetrain::clamp_torque(u.tau_ref[i], p.drivetrain),
            p.drivetrain.time_constant);
    }
    const double yaw = s.pose.z();
    d.dpose = Vec3(s.v.x() * std::cos(yaw) - s.v.y() * std::sin(yaw),
                   s.v.x() * std::sin(yaw) + s.v.y() * std::cos(yaw), s.omega.z());
    d.diag = diag;
    d.accel_cp = accel;
    return d;
}

inline VehicleState axpy(const VehicleState& s, double h, const PlantDerivs& d) {
    VehicleState out = s;
    out.v += h * d.dv;
    out.omega += h * d.domega;
    for (int i = 0; i < kNumWheels; ++i) {
        out.wheel_speed[i] += h * d.dwheel_speed[i];
        out.torque[i] += h * d.dtorque[i];
    }
    out.pose += h * d.dpose;
    return out;
}

/// One classical RK4 step with tire forces recomputed at every stage.
/// Deterministic: identical inputs produce bit-identical outputs.
inline VehicleState step(const VehicleState& s, const PlantInput& u,
                         const TireInterfaceState& iface, const PlantParams& p,
                         double dt, double t_now = 0.0) {
    const PlantDerivs k1 = evaluate(s, u, iface, p);
    const PlantDerivs k2 = evaluate(axpy(s, dt / 2.0, k1), u, iface, p);
    const PlantDerivs k3 = evaluate(axpy(s, dt / 2.0, k2), u, iface, p);
    const PlantDerivs k4 = evaluate(axpy(s, dt, k3), u, iface, p);

    VehicleState out = s;
    out.v += dt / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
    out.omega += dt / 6.0 * (k1.domega + 2.0 * k2.domega + 2.0 * k3.domega + k4.domega);
    for (int i = 0; i < kNumWheels; ++i) {
        out.wheel_speed[i] += dt / 6.0 *
                              (k1.dwheel_speed[i] + 2.0 * k2.dwheel_speed[i] +
                               2.0 * k3.dwheel_speed[i] + k4.dwheel_speed[i]);
        out.torque[i] += dt / 6.0 * (k1.dtorque[i] + 2.0 * k2.dtorque[i] +
                                     2.0 * k3.dtorque[i] + k4.dtorque[i]);
    }
    out.pose += dt / 6.0 * (k1.dpose + 2.0 * k2.dpose + 2.0 * k3.dpose + k4.dpose);

    if (!out.finite()) throw SimulationDiverged(t_now + dt, "non-finite state entry");
    return out;
}

}  // namespace model
}  // namespace twintrack
