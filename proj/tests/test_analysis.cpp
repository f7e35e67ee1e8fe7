#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "twintrack/analysis.hpp"

using namespace twintrack;
using Catch::Approx;

TEST_CASE("trim at fixed slip") {
    const PlantParams p = reference_params();

    SECTION("residual below tolerance at lambda = 0.05, v = 15") {
        const OperatingPoint op = analysis::trim_at_slip(0.05, 15.0, p);
        CHECK(op.residual < 1e-6);
        // wheel speeds above rolling speed in drive
        for (double w : op.state.wheel_speed)
            CHECK(w * p.tire.wheel_radius > 15.0);
    }

    SECTION("zero slip with losses and drag disabled gives zero torque") {
        PlantParams q = p;
        q.drivetrain.viscous = 0.0;
        q.drivetrain.coulomb = 0.0;
        const OperatingPoint op = analysis::trim_at_slip(0.0, 12.0, q);
        for (double t : op.input.tau_ref) CHECK(std::abs(t) < 1e-6);
    }

    SECTION("torque increases with slip below the peak") {
        const OperatingPoint a = analysis::trim_at_slip(0.02, 15.0, p);
        const OperatingPoint b = analysis::trim_at_slip(0.05, 15.0, p);
        for (int i = 0; i < kNumWheels; ++i)
            CHECK(b.input.tau_ref[i] > a.input.tau_ref[i]);
    }

    SECTION("slip target outside the definable range throws") {
        CHECK_THROWS_AS(analysis::trim_at_slip(1.0, 15.0, p), TrimFailure);
        CHECK_THROWS_AS(analysis::trim_at_slip(-1.0, 15.0, p), TrimFailure);
    }
}

TEST_CASE("finite-difference linearization") {
    const PlantParams p = reference_params();

    SECTION("recovers the actuator-lag block exactly") {
        const OperatingPoint op = analysis::trim_at_slip(0.03, 15.0, p);
        const LinearModel lm = analysis::linearize(op, p);
        for (int i = 0; i < kNumWheels; ++i) {
            const int ti = LinearModel::torque_index(i);
            CHECK(lm.a(ti, ti) ==
                  Approx(-1.0 / p.drivetrain.time_constant).epsilon(1e-6));
            CHECK(lm.b(ti, i) ==
                  Approx(1.0 / p.drivetrain.time_constant).epsilon(1e-6));
        }
    }

    SECTION("torque-to-wheel-speed coupling is 1/J") {
        const OperatingPoint op = analysis::trim_at_slip(0.03, 15.0, p);
        const LinearModel lm = analysis::linearize(op, p);
        for (int i = 0; i < kNumWheels; ++i) {
            CHECK(lm.a(LinearModel::wheel_speed_index(i), LinearModel::torque_index(i)) ==
                  Approx(1.0 / p.drivetrain.inertia).epsilon(1e-5));
        }
    }

    SECTION("second-order step convergence of the Jacobian") {
        const OperatingPoint op = analysis::trim_at_slip(0.03, 15.0, p);
        const LinearModel c = analysis::linearize(op, p, 1e-6);
        const LinearModel h1 = analysis::linearize(op, p, 4e-4);
        const LinearModel h2 = analysis::linearize(op, p, 2e-4);
        const double e1 = (h1.a - c.a).cwiseAbs().maxCoeff();
        const double e2 = (h2.a - c.a).cwiseAbs().maxCoeff();
        CHECK(e1 / e2 > 2.5);  // ~4 for a clean O(h^2) scheme
    }
}

TEST_CASE("wheel mode and stability dichotomy") {
    const PlantParams p = reference_params();

    SECTION("below the force peak the wheel mode is stable") {
        const OperatingPoint op = analysis::trim_at_slip(0.03, 15.0, p);
        const LinearModel lm = analysis::linearize(op, p);
        CHECK(analysis::wheel_mode_eigenvalue(lm, 0) < 0.0);
    }

    SECTION("past the force peak the wheel mode destabilizes") {
        const double peak = tire::slip_curve_peak(p.tire, 1.0, 1.0).first;
        const OperatingPoint op = analysis::trim_at_slip(peak + 0.05, 15.0, p);
        const LinearModel lm = analysis::linearize(op, p);
        CHECK(analysis::wheel_mode_eigenvalue(lm, 0) > 0.0);
    }

    SECTION("sign flip is co-located with the slip-curve peak") {
        const double peak = tire::slip_curve_peak(p.tire, 1.0, 1.0).first;
        auto ev_at = [&](double lam) {
            const OperatingPoint op = analysis::trim_at_slip(lam, 15.0, p);
            return analysis::wheel_mode_eigenvalue(analysis::linearize(op, p), 0);
        };
        CHECK(ev_at(peak - 0.01) < 0.0);
        CHECK(ev_at(peak + 0.01) > 0.0);
    }
}

TEST_CASE("wheel submodel and discretization") {
    const PlantParams p = reference_params();
    const OperatingPoint op = analysis::trim_at_slip(0.03, 15.0, p);
    const LinearModel lm = analysis::linearize(op, p);
    const analysis::WheelSubmodel sub = analysis::wheel_submodel(lm, p, 0);

    SECTION("submodel entries match the full model's wheel block") {
        const int wi = LinearModel::wheel_speed_index(0);
        const int ti = LinearModel::torque_index(0);
        CHECK(sub.a(0, 0) == lm.a(wi, wi));
        CHECK(sub.a(0, 1) == lm.a(wi, ti));
        CHECK(sub.a(1, 1) == lm.a(ti, ti));
        CHECK(sub.b(1) == lm.b(ti, 0));
    }

    SECTION("slip output row matches its analytic value in drive") {
        // drive branch: lambda = (w r - vx) / (w r), d lambda/d w = vx / (w^2 r)
        const double w0 = op.state.wheel_speed[0];
        const double expected = op.state.v.x() / (w0 * w0 * p.tire.wheel_radius);
        CHECK(sub.c(0) == Approx(expected).epsilon(1e-6));
    }

    SECTION("exact discretization of a scalar lag") {
        Eigen::MatrixXd a(1, 1), b(1, 1);
        a << -3.0;
        b << 3.0;
        Eigen::MatrixXd ad, bd;
        analysis::discretize(a, b, 0.01, ad, bd);
        CHECK(ad(0, 0) == Approx(std::exp(-0.03)).epsilon(1e-12));
        CHECK(bd(0, 0) == Approx(1.0 - std::exp(-0.03)).epsilon(1e-12));
    }

    SECTION("discrete submodel eigenvalue magnitudes equal |exp(lambda_c Ts)|") {
        Eigen::MatrixXd ad, bd;
        analysis::discretize(sub.a, sub.b, 0.01, ad, bd);
        const Eigen::VectorXcd ec = Eigen::EigenSolver<Eigen::MatrixXd>(
                                        Eigen::MatrixXd(sub.a)).eigenvalues();
        const Eigen::VectorXcd ed = Eigen::EigenSolver<Eigen::MatrixXd>(ad).eigenvalues();
        std::vector<double> m1, m2;
        for (int i = 0; i < ec.size(); ++i) {
            m1.push_back(std::abs(std::exp(ec(i) * 0.01)));
            m2.push_back(std::abs(ed(i)));
        }
        std::sort(m1.begin(), m1.end());
        std::sort(m2.begin(), m2.end());
        for (size_t i = 0; i < m1.size(); ++i) CHECK(m2[i] == Approx(m1[i]).epsilon(1e-9));
    }
}

TEST_CASE("closed-loop spectrum") {
    const PlantParams p = reference_params();
    const ControllerGains g = default_gains(p.tire);

    SECTION("stable on operating points below the peak") {
        const OperatingPoint op = analysis::trim_at_slip(0.03, 15.0, p);
        const LinearModel lm = analysis::linearize(op, p);
        const auto eigs = analysis::closed_loop_spectrum(lm, p, g, 0);
        CHECK(analysis::spectral_radius(eigs) < 1.0);
    }

    SECTION("stabilizes the open-loop-unstable branch past the peak") {
        const double peak = tire::slip_curve_peak(p.tire, 1.0, 1.0).first;
        const OperatingPoint op = analysis::trim_at_slip(peak + 0.05, 15.0, p);
        const LinearModel lm = analysis::linearize(op, p);
        CHECK(analysis::wheel_mode_eigenvalue(lm, 0) > 0.0);  // open loop unstable
        const auto eigs = analysis::closed_loop_spectrum(lm, p, g, 0);
        CHECK(analysis::spectral_radius(eigs) < 1.0);
    }

    SECTION("zero gains reproduce the open-loop discrete spectrum") {
        ControllerGains z = g;
        z.slip_kp = z.slip_ki = z.slip_kd = 0.0;
        const OperatingPoint op = analysis::trim_at_slip(0.03, 15.0, p);
        const LinearModel lm = analysis::linearize(op, p);
        const analysis::WheelSubmodel sub = analysis::wheel_submodel(lm, p, 0);
        Eigen::MatrixXd ad, bd;
        analysis::discretize(sub.a, sub.b, z.ts, ad, bd);
        const double open_sr =
            Eigen::EigenSolver<Eigen::MatrixXd>(ad).eigenvalues().cwiseAbs().maxCoeff();
        const auto eigs = analysis::closed_loop_spectrum(lm, p, z, 0);
        // the open integrator contributes a unit eigenvalue; the plant part
        // must match the undriven discrete spectrum
        CHECK(analysis::spectral_radius(eigs) ==
              Approx(std::max(open_sr, 1.0)).epsilon(1e-9));
    }
}
