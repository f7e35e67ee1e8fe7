#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "twintrack/params.hpp"

namespace twintrack {

enum class DriveMode { SelfDriving, DriverInLoop };

/// CP-level motion setpoints. v_ref is consumed in SelfDriving mode,
/// a_ref in DriverInLoop mode; yaw_rate_ref and gamma apply to both.
struct MotionReference {
    DriveMode mode = DriveMode::SelfDriving;
    double v_ref = 0.0;         // m/s, CP longitudinal velocity
    double a_ref = 0.0;         // m/s^2, CP longitudinal acceleration
    double yaw_rate_ref = 0.0;  // rad/s
    double gamma = 0.0;         // yaw-preference tuning, >= 0
    double delta = 0.0;         // rad, steering command
};

namespace transform {

/// CP velocity to wheel pivot point, with the gamma augmentation that
/// amplifies the yaw-rate contribution to the x component. gamma = 0
/// recovers the pure rigid-body kinematics. Applied identically to
/// references and measurements.
inline Vec3 cp_to_wheel_velocity(const Vec3& v, const Vec3& omega, const Vec3& r,
                                 double gamma) {
    Vec3 out = v + omega.cross(r);
    out.x() += gamma * (-omega.z() * r.y());
    return out;
}

/// Driver-in-loop variant: the CP translation is zeroed and only the
/// rotational component (plus augmentation) forms the reference.
inline double cp_to_wheel_velocity_driver(const Vec3& omega_ref, const Vec3& r,
                                          double gamma) {
    return cp_to_wheel_velocity(Vec3::Zero(), omega_ref, r, gamma).x();
}

/// Per-wheel acceleration reference in normal (non-limited) operation.
inline double wheel_acceleration_ref(double a_ref_cp, double a_lat) {
    return a_ref_cp + a_lat;
}

/// Traction-limit arbitration: when any commanded slip ratio is close to
/// saturation, yaw-rate tracking is preferred by subtracting the largest
/// lateral correction from the common acceleration demand.
inline std::array<double, kNumWheels> traction_limit_adjust(
    double a_ref_cp, const std::array<double, kNumWheels>& a_lat,
    const std::array<double, kNumWheels>& lambda_ref, double lambda_max,
    double threshold, bool& latched, double hysteresis = 0.05) {
    double max_abs_ref = 0.0;
    for (double l : lambda_ref) max_abs_ref = std::max(max_abs_ref, std::abs(l));
    if (!latched && max_abs_ref >= threshold * lambda_max) latched = true;
    if (latched && max_abs_ref < (threshold - hysteresis) * lambda_max) latched = false;

    std::array<double, kNumWheels> out{};
    if (!latched) {
        for (int i = 0; i < kNumWheels; ++i)
            out[i] = wheel_acceleration_ref(a_ref_cp, a_lat[i]);
        return out;
    }
    const double a_lat_max = *std::max_element(a_lat.begin(), a_lat.end());
    for (int i = 0; i < kNumWheels; ++i)
        out[i] = (a_ref_cp - a_lat_max) + a_lat[i];
    return out;
}

/// Rotation from the wheel-pivot frame into the (steered) wheel frame.
inline std::pair<double, double> wheel_frame_velocity(const Vec3& v_pivot, double delta) {
    const double c = std::cos(delta), s = std::sin(delta);
    return {v_pivot.x() * c + v_pivot.y() * s, -v_pivot.x() * s + v_pivot.y() * c};
}

}  // namespace transform
}  // namespace twintrack
