#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>

namespace twintrack {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Wheel indexing used throughout: 0 = front-left, 1 = front-right,
// 2 = rear-left, 3 = rear-right. Body frame: x forward, y left, z up.
inline constexpr int kNumWheels = 4;

inline bool is_front(int wheel) { return wheel < 2; }
inline bool is_left(int wheel) { return wheel % 2 == 0; }

/// Static rigid-body description of the vehicle at its center point (CP,
/// coincident with the CG for the shipped parameter set).
struct VehicleParams {
    double mass = 0.0;                       // kg
    Mat3 inertia = Mat3::Zero();             // kg m^2, about CP
    std::array<Vec3, kNumWheels> wheel_pos;  // m, body frame
    Vec3 aero_center = Vec3::Zero();         // m, body frame
    double drag_coeff = 0.0;                 // c_res, dimensionless
    double air_density = 1.206;              // kg/m^3
    double frontal_area = 0.0;               // m^2
    double gravity = 9.81;                   // m/s^2
    double cg_height = 0.0;                  // m, above ground, for load transfer

    void validate() const {
        if (!(mass > 0.0)) throw std::invalid_argument("VehicleParams: mass must be > 0");
        if (!inertia.isApprox(inertia.transpose(), 1e-12))
            throw std::invalid_argument("VehicleParams: inertia must be symmetric");
        Eigen::SelfAdjointEigenSolver<Mat3> es(inertia);
        if (es.eigenvalues().minCoeff() <= 0.0)
            throw std::invalid_argument("VehicleParams: inertia must be positive definite");
        for (int i = 0; i < kNumWheels; ++i) {
            for (int j = i + 1; j < kNumWheels; ++j) {
                if ((wheel_pos[i] - wheel_pos[j]).norm() < 1e-9)
                    throw std::invalid_argument("VehicleParams: wheel positions must be distinct");
            }
        }
        // left/right wheels sit on opposite sides of the x axis
        for (int i = 0; i < kNumWheels; ++i) {
            const double y = wheel_pos[i].y();
            if (is_left(i) ? !(y > 0.0) : !(y < 0.0))
                throw std::invalid_argument("VehicleParams: wheel y signs inconsistent with indexing");
        }
    }

    double wheelbase() const {
        return wheel_pos[0].x() - wheel_pos[2].x();
    }
    double track_front() const { return wheel_pos[0].y() - wheel_pos[1].y(); }
    double track_rear() const { return wheel_pos[2].y() - wheel_pos[3].y(); }
};

/// Pacejka shaping coefficients for one direction of force generation.
struct PacejkaCoeffs {
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double e = 0.0;
};

struct TireParams {
    PacejkaCoeffs longitudinal;
    PacejkaCoeffs lateral;
    double mu = 1.0;          // nominal friction
    double wheel_radius = 0.0;  // m, effective

    void validate() const {
        auto check = [](const PacejkaCoeffs& p, const char* dir) {
            if (!(p.b > 0.0) || !(p.c > 1.0 && p.c <= 2.0) || !(p.d > 0.0))
                throw std::invalid_argument(std::string("TireParams: bad Pacejka coefficients (") + dir + ")");
        };
        check(longitudinal, "longitudinal");
        check(lateral, "lateral");
        if (!(mu > 0.0)) throw std::invalid_argument("TireParams: mu must be > 0");
        if (!(wheel_radius > 0.0)) throw std::invalid_argument("TireParams: wheel_radius must be > 0");
    }
};

struct DrivetrainParams {
    double inertia = 0.0;        // J, kg m^2, wheel plus drivetrain
    double wheel_radius = 0.0;   // m
    double time_constant = 0.0;  // T, s, actuator first-order lag
    double torque_min = 0.0;     // N m
    double torque_max = 0.0;     // N m
    double viscous = 0.0;        // b, N m s/rad
    double coulomb = 0.0;        // c0, N m
    double coulomb_width = 1.0;  // w, rad/s, tanh smoothing

    void validate() const {
        if (!(inertia > 0.0)) throw std::invalid_argument("DrivetrainParams: inertia must be > 0");
        if (!(time_constant > 0.0)) throw std::invalid_argument("DrivetrainParams: time_constant must be > 0");
        if (!(torque_min < 0.0 && torque_max > 0.0))
            throw std::invalid_argument("DrivetrainParams: torque limits must straddle 0");
        if (viscous < 0.0 || coulomb < 0.0 || !(coulomb_width > 0.0))
            throw std::invalid_argument("DrivetrainParams: bad resistive torque coefficients");
    }
};

struct PlantParams {
    VehicleParams vehicle;
    TireParams tire;
    DrivetrainParams drivetrain;
    bool epsilon_scales_lateral = false;  // config switch, off by default

    void validate() const {
        vehicle.validate();
        tire.validate();
        drivetrain.validate();
    }
};

/// Reference passenger-car parameter set. These values are NOT taken from
/// any published experiment; they are a self-consistent set used by the
/// shipped scenarios and tests. CG sits rearwards of the geometric center.
inline PlantParams reference_params() {
    PlantParams p;
    p.vehicle.mass = 1400.0;
    p.vehicle.inertia = Vec3(600.0, 1500.0, 2100.0).asDiagonal();
    p.vehicle.wheel_pos[0] = Vec3(1.45, 0.77, 0.0);    // FL
    p.vehicle.wheel_pos[1] = Vec3(1.45, -0.77, 0.0);   // FR
    p.vehicle.wheel_pos[2] = Vec3(-1.25, 0.77, 0.0);   // RL
    p.vehicle.wheel_pos[3] = Vec3(-1.25, -0.77, 0.0);  // RR
    p.vehicle.aero_center = Vec3(0.2, 0.0, 0.3);
    p.vehicle.drag_coeff = 0.8;
    p.vehicle.air_density = 1.206;
    p.vehicle.frontal_area = 2.0;
    p.vehicle.gravity = 9.81;
    p.vehicle.cg_height = 0.48;

    p.tire.longitudinal = {16.0, 1.9, 1.0, 0.97};
    p.tire.lateral = {8.0, 1.3, 1.0, 0.98};
    p.tire.mu = 1.0;
    p.tire.wheel_radius = 0.31;

    p.drivetrain.inertia = 1.3;
    p.drivetrain.wheel_radius = 0.31;
    p.drivetrain.time_constant = 0.010;
    p.drivetrain.torque_min = -1600.0;
    p.drivetrain.torque_max = 1600.0;
    p.drivetrain.viscous = 0.02;
    p.drivetrain.coulomb = 3.0;
    p.drivetrain.coulomb_width = 0.5;
    return p;
}

}  // namespace twintrack
