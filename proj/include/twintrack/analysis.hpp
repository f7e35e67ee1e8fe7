#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "twintrack/controller.hpp"
#include "twintrack/errors.hpp"
#include "twintrack/vehicle.hpp"

namespace twintrack {

/// Trimmed equilibrium of the wheel subsystem at fixed vehicle speed.
struct OperatingPoint {
    VehicleState state;
    PlantInput input;
    TireInterfaceState iface;
    double residual = 0.0;  // wheel-dynamics derivative norm at the OP
};

/// Finite-difference linear model of the plant around an operating point.
/// States: [v(3), omega(3), wheel_speed(4), torque(4)]; inputs: tau_ref(4).
struct LinearModel {
    Eigen::MatrixXd a;
    Eigen::MatrixXd b;
    std::vector<std::string> state_labels;
    std::vector<std::string> input_labels;
    OperatingPoint op;

    static constexpr int kStates = 14;
    static constexpr int kInputs = 4;
    static int wheel_speed_index(int wheel) { return 6 + wheel; }
    static int torque_index(int wheel) { return 10 + wheel; }
};

namespace analysis {

inline double wheel_speed_for_slip(double lambda, double vx, double wheel_radius) {
    if (lambda >= 1.0 || lambda <= -1.0)
        throw TrimFailure("wheel_speed_for_slip: slip target outside (-1, 1)");
    if (lambda >= 0.0) return vx / (wheel_radius * (1.0 - lambda));  // drive branch
    return vx * (1.0 + lambda) / wheel_radius;                       // brake branch
}

inline double wheel_residual_norm(const VehicleState& s, const PlantInput& u,
                                  const TireInterfaceState& iface, const PlantParams& p) {
    const model::PlantDerivs d = model::evaluate(s, u, iface, p);
    double sq = 0.0;
    for (int i = 0; i < kNumWheels; ++i)
        sq += d.dwheel_speed[i] * d.dwheel_speed[i] + d.dtorque[i] * d.dtorque[i];
    return std::sqrt(sq);
}

/// Finds the constant per-wheel torque holding all four slip ratios at
/// lambda_target while the vehicle travels straight at vx. The vehicle
/// speed is treated as frozen (quasi-static); the returned residual is
/// the wheel-subsystem derivative norm. Per-wheel bisection with a
/// Gauss-Seidel sweep resolves the load-transfer coupling.
inline OperatingPoint trim_at_slip(double lambda_target, double vx,
                                   const PlantParams& p,
                                   const TireInterfaceState& iface = {}) {
    OperatingPoint op;
    op.iface = iface;
    op.state.v = Vec3(vx, 0.0, 0.0);
    const double omega_w = wheel_speed_for_slip(lambda_target, vx, p.tire.wheel_radius);
    op.state.wheel_speed.fill(omega_w);
    op.input.delta = 0.0;

    const double bracket = 4.0 * std::max(std::abs(p.drivetrain.torque_min),
                                          p.drivetrain.torque_max);
    for (int sweep = 0; sweep < 12; ++sweep) {
        for (int i = 0; i < kNumWheels; ++i) {
            auto residual = [&](double tau) {
                VehicleState s = op.state;
                PlantInput u = op.input;
                s.torque[i] = tau;
                u.tau_ref[i] = tau;
                return model::evaluate(s, u, iface, p).dwheel_speed[i];
            };
            double lo = -bracket, hi = bracket;
            double flo = residual(lo), fhi = residual(hi);
            if (flo * fhi > 0.0)
                throw TrimFailure("trim_at_slip: no torque bracket for slip target " +
                                  std::to_string(lambda_target));
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fmid = residual(mid);
                if (flo * fmid <= 0.0) {
                    hi = mid;
                    fhi = fmid;
                } else {
                    lo = mid;
                    flo = fmid;
                }
            }
            const double tau = 0.5 * (lo + hi);
            op.state.torque[i] = tau;
            op.input.tau_ref[i] = tau;
        }
        op.residual = wheel_residual_norm(op.state, op.input, iface, p);
        if (op.residual < 1e-8) break;
    }
    return op;
}

namespace detail {

inline Eigen::Matrix<double, LinearModel::kStates, 1> pack(const VehicleState& s) {
    Eigen::Matrix<double, LinearModel::kStates, 1> x;
    x.segment<3>(0) = s.v;
    x.segment<3>(3) = s.omega;
    for (int i = 0; i < kNumWheels; ++i) {
        x(6 + i) = s.wheel_speed[i];
        x(10 + i) = s.torque[i];
    }
    return x;
}

inline VehicleState unpack(const Eigen::Matrix<double, LinearModel::kStates, 1>& x,
                           const VehicleState& like) {
    VehicleState s = like;
    s.v = x.segment<3>(0);
    s.omega = x.segment<3>(3);
    for (int i = 0; i < kNumWheels; ++i) {
        s.wheel_speed[i] = x(6 + i);
        s.torque[i] = x(10 + i);
    }
    return s;
}

inline Eigen::Matrix<double, LinearModel::kStates, 1> deriv_vec(
    const VehicleState& s, const PlantInput& u, const TireInterfaceState& iface,
    const PlantParams& p) {
    const model::PlantDerivs d = model::evaluate(s, u, iface, p);
    Eigen::Matrix<double, LinearModel::kStates, 1> x;
    x.segment<3>(0) = d.dv;
    x.segment<3>(3) = d.domega;
    for (int i = 0; i < kNumWheels; ++i) {
        x(6 + i) = d.dwheel_speed[i];
        x(10 + i) = d.dtorque[i];
    }
    return x;
}

}  // namespace detail

/// Central finite-difference Jacobians of the plant derivative around a
/// trimmed operating point; h is relative, scaled per entry.
inline LinearModel linearize(const OperatingPoint& op, const PlantParams& p,
                             double h_rel = 1e-6) {
    LinearModel lm;
    lm.op = op;
    lm.a.resize(LinearModel::kStates, LinearModel::kStates);
    lm.b.resize(LinearModel::kStates, LinearModel::kInputs);
    const auto x0 = detail::pack(op.state);

    for (int j = 0; j < LinearModel::kStates; ++j) {
        const double h = h_rel * (1.0 + std::abs(x0(j)));
        auto xp = x0, xm = x0;
        xp(j) += h;
        xm(j) -= h;
        const auto fp = detail::deriv_vec(detail::unpack(xp, op.state), op.input, op.iface, p);
        const auto fm = detail::deriv_vec(detail::unpack(xm, op.state), op.input, op.iface, p);
        lm.a.col(j) = (fp - fm) / (2.0 * h);
    }
    for (int j = 0; j < LinearModel::kInputs; ++j) {
        const double h = h_rel * (1.0 + std::abs(op.input.tau_ref[j]));
        PlantInput up = op.input, um = op.input;
        up.tau_ref[j] += h;
        um.tau_ref[j] -= h;
        const auto fp = detail::deriv_vec(op.state, up, op.iface, p);
        const auto fm = detail::deriv_vec(op.state, um, op.iface, p);
        lm.b.col(j) = (fp - fm) / (2.0 * h);
    }
    if (!lm.a.allFinite() || !lm.b.allFinite())
        throw std::runtime_error("linearize: non-finite Jacobian entry");

    lm.state_labels = {"vx", "vy", "vz", "wx", "wy", "wz", "omega1", "omega2",
                       "omega3", "omega4", "tau1", "tau2", "tau3", "tau4"};
    lm.input_labels = {"tau_ref1", "tau_ref2", "tau_ref3", "tau_ref4"};
    return lm;
}

/// Eigenvalue of the wheel-speed-dominant mode for the requested wheel.
/// The four wheel modes are nearly degenerate, so the returned
/// eigenvectors can mix wheels arbitrarily; dominance is therefore judged
/// on the whole wheel-speed subspace (>= 0.5 participation), and the
/// requested wheel selects the best-aligned mode within that group.
inline double wheel_mode_eigenvalue(const LinearModel& lm, int wheel) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(lm.a);
    const int idx = LinearModel::wheel_speed_index(wheel);
    double best_align = -1.0;
    std::complex<double> best_ev;
    for (int k = 0; k < lm.a.rows(); ++k) {
        const Eigen::VectorXcd v = es.eigenvectors().col(k);
        double group = 0.0;
        for (int j = 0; j < kNumWheels; ++j)
            group += std::norm(v(LinearModel::wheel_speed_index(j)));
        group /= v.squaredNorm();
        if (group < 0.5) continue;
        const double align = std::norm(v(idx)) / v.squaredNorm();
        if (align > best_align) {
            best_align = align;
            best_ev = es.eigenvalues()(k);
        }
    }
    if (best_align < 0.0)
        throw ModeIdentificationError(
            "wheel_mode_eigenvalue: no mode with >= 0.5 wheel-speed participation");
    return best_ev.real();
}

/// Two-state wheel subsystem (wheel speed, actuator torque) extracted
/// from the full linearization, with the slip ratio as output. The
/// coupling to the frozen vehicle states is dropped.
struct WheelSubmodel {
    Eigen::Matrix2d a;
    Eigen::Vector2d b;
    Eigen::RowVector2d c;  // slip-ratio output
};

inline WheelSubmodel wheel_submodel(const LinearModel& lm, const PlantParams& p,
                                    int wheel) {
    const int iw = LinearModel::wheel_speed_index(wheel);
    const int it = LinearModel::torque_index(wheel);
    WheelSubmodel sub;
    sub.a << lm.a(iw, iw), lm.a(iw, it), lm.a(it, iw), lm.a(it, it);
    sub.b << lm.b(iw, wheel), lm.b(it, wheel);

    const double vx = lm.op.state.v.x();
    const double w0 = lm.op.state.wheel_speed[wheel];
    const double h = 1e-6 * (1.0 + std::abs(w0));
    const double lp = tire::slip_ratio(w0 + h, p.tire.wheel_radius, vx);
    const double lmn = tire::slip_ratio(w0 - h, p.tire.wheel_radius, vx);
    sub.c << (lp - lmn) / (2.0 * h), 0.0;
    return sub;
}

/// Exact zero-order-hold discretization via the augmented matrix
/// exponential.
inline void discretize(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double ts,
                       Eigen::MatrixXd& ad, Eigen::MatrixXd& bd) {
    const int n = static_cast<int>(a.rows());
    const int m = static_cast<int>(b.cols());
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
    aug.topLeftCorner(n, n) = a * ts;
    aug.topRightCorner(n, m) = b * ts;
    const Eigen::MatrixXd e = aug.exp();
    ad = e.topLeftCorner(n, n);
    bd = e.topRightCorner(n, m);
}

/// Discrete state-space form of the slip PID (unsaturated), matching the
/// implemented difference equations. States: [integrator, derivative
/// filter, previous measurement]; input: slip measurement (reference 0).
struct PidLinear {
    Eigen::Matrix3d a;
    Eigen::Vector3d b;
    Eigen::RowVector3d c;
    double d = 0.0;
};

inline PidLinear slip_pid_linear(const ControllerGains& g) {
    const double tf = 1.0 / g.slip_nf;
    const double kf = 1.0 / (tf + g.ts);
    PidLinear pl;
    pl.a << 1.0, 0.0, 0.0,
            0.0, tf * kf, g.slip_kd * kf,
            0.0, 0.0, 0.0;
    pl.b << -g.slip_ki * g.ts, -g.slip_kd * kf, 1.0;
    pl.c << 1.0, tf * kf, g.slip_kd * kf;
    pl.d = -(g.slip_kp + g.slip_ki * g.ts + g.slip_kd * kf);
    return pl;
}

/// Eigenvalues of the sampled-data closed loop: wheel subsystem
/// discretized exactly at Ts with the slip PID in the loop.
inline Eigen::VectorXcd closed_loop_spectrum(const LinearModel& lm,
                                             const PlantParams& p,
                                             const ControllerGains& g, int wheel) {
    const WheelSubmodel sub = wheel_submodel(lm, p, wheel);
    Eigen::MatrixXd ad, bd;
    discretize(sub.a, sub.b, g.ts, ad, bd);
    const PidLinear pid = slip_pid_linear(g);

    Eigen::MatrixXd acl = Eigen::MatrixXd::Zero(5, 5);
    acl.topLeftCorner(2, 2) = ad + bd * pid.d * sub.c;
    acl.topRightCorner(2, 3) = bd * pid.c;
    acl.bottomLeftCorner(3, 2) = pid.b * sub.c;
    acl.bottomRightCorner(3, 3) = pid.a;
    return Eigen::EigenSolver<Eigen::MatrixXd>(acl).eigenvalues();
}

inline double spectral_radius(const Eigen::VectorXcd& eigs) {
    double r = 0.0;
    for (int i = 0; i < eigs.size(); ++i) r = std::max(r, std::abs(eigs(i)));
    return r;
}

}  // namespace analysis
}  // namespace twintrack
