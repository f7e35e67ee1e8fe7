#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "twintrack/transform.hpp"

using namespace twintrack;
using Catch::Approx;

TEST_CASE("cp to wheel velocity") {
    SECTION("pure translation") {
        const Vec3 v(7.0, -1.0, 0.0);
        for (double g : {0.0, 5.0})
            CHECK(transform::cp_to_wheel_velocity(v, Vec3::Zero(), Vec3(1.2, 0.7, 0.0), g)
                      .isApprox(v));
    }
    SECTION("hand cross-product, gamma = 0") {
        const Vec3 out = transform::cp_to_wheel_velocity(
            Vec3(10.0, 0.0, 0.0), Vec3(0.0, 0.0, 1.0), Vec3(1.2, -0.75, 0.0), 0.0);
        CHECK(out.x() == Approx(10.75));
        CHECK(out.y() == Approx(1.2));
    }
    SECTION("gamma amplifies the yaw-rate contribution") {
        const Vec3 out = transform::cp_to_wheel_velocity(
            Vec3(10.0, 0.0, 0.0), Vec3(0.0, 0.0, 1.0), Vec3(1.2, -0.75, 0.0), 10.0);
        CHECK(out.x() == Approx(18.25));
        CHECK(out.y() == Approx(1.2));  // only x is augmented
    }
}

TEST_CASE("driver-mode transformation") {
    SECTION("zero yaw reference gives zero") {
        for (double g : {0.0, 10.0})
            CHECK(transform::cp_to_wheel_velocity_driver(Vec3::Zero(), Vec3(1.3, 0.8, 0.0), g) ==
                  0.0);
    }
    SECTION("antisymmetric left/right") {
        const Vec3 w(0.0, 0.0, 0.5);
        const double left =
            transform::cp_to_wheel_velocity_driver(w, Vec3(1.2, 0.75, 0.0), 0.0);
        const double right =
            transform::cp_to_wheel_velocity_driver(w, Vec3(1.2, -0.75, 0.0), 0.0);
        CHECK(left == Approx(-0.375));
        CHECK(right == Approx(0.375));
    }
    SECTION("gamma = 10 multiplies by 11") {
        const Vec3 w(0.0, 0.0, 0.5);
        const double base =
            transform::cp_to_wheel_velocity_driver(w, Vec3(1.2, 0.75, 0.0), 0.0);
        const double aug =
            transform::cp_to_wheel_velocity_driver(w, Vec3(1.2, 0.75, 0.0), 10.0);
        CHECK(aug == Approx(11.0 * base));
    }
}

TEST_CASE("wheel acceleration reference") {
    CHECK(transform::wheel_acceleration_ref(2.0, 0.0) == 2.0);
    const std::array<double, 4> a_lat = {0.3, -0.3, 0.1, -0.1};
    const std::array<double, 4> expected = {2.3, 1.7, 2.1, 1.9};
    double mean = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double r = transform::wheel_acceleration_ref(2.0, a_lat[i]);
        CHECK(r == Approx(expected[i]));
        mean += r / 4.0;
    }
    CHECK(mean == Approx(2.0));
}

TEST_CASE("traction limit arbitration") {
    const double lambda_max = 0.1, theta = 0.9;
    const std::array<double, 4> a_lat = {0.5, -0.5, 0.2, -0.2};

    SECTION("not triggered: plain Eq-18 references") {
        bool latched = false;
        const std::array<double, 4> small = {0.01, 0.01, 0.01, 0.01};
        const auto out =
            transform::traction_limit_adjust(3.0, a_lat, small, lambda_max, theta, latched);
        CHECK_FALSE(latched);
        for (int i = 0; i < 4; ++i) CHECK(out[i] == Approx(3.0 + a_lat[i]));
    }
    SECTION("triggered: max lateral correction subtracted") {
        bool latched = false;
        const std::array<double, 4> big = {0.095, 0.0, 0.0, 0.0};
        const auto out =
            transform::traction_limit_adjust(3.0, a_lat, big, lambda_max, theta, latched);
        CHECK(latched);
        const std::array<double, 4> expected = {3.0, 2.0, 2.7, 2.3};
        for (int i = 0; i < 4; ++i) CHECK(out[i] == Approx(expected[i]));
        // the wheel achieving a_lat_max gets exactly the CP demand
        CHECK(out[0] == Approx(3.0));
    }
    SECTION("triggered with equal lateral corrections: pure CP demand") {
        bool latched = true;
        const std::array<double, 4> eq = {0.2, 0.2, 0.2, 0.2};
        const std::array<double, 4> refs = {0.095, 0.0, 0.0, 0.0};
        const auto out =
            transform::traction_limit_adjust(3.0, eq, refs, lambda_max, theta, latched);
        for (double v : out) CHECK(v == Approx(3.0));
    }
    SECTION("hysteresis prevents chattering at the trigger boundary") {
        bool latched = false;
        std::array<double, 4> refs = {0.091, 0.0, 0.0, 0.0};
        transform::traction_limit_adjust(3.0, a_lat, refs, lambda_max, theta, latched);
        CHECK(latched);
        refs[0] = 0.088;  // inside the hysteresis band: stays latched
        transform::traction_limit_adjust(3.0, a_lat, refs, lambda_max, theta, latched);
        CHECK(latched);
        refs[0] = 0.080;  // below (theta - 0.05) * lambda_max: releases
        transform::traction_limit_adjust(3.0, a_lat, refs, lambda_max, theta, latched);
        CHECK_FALSE(latched);
    }
}

TEST_CASE("wheel frame rotation") {
    SECTION("identity at zero steering") {
        auto [x, y] = transform::wheel_frame_velocity(Vec3(3.0, -2.0, 0.0), 0.0);
        CHECK(x == 3.0);
        CHECK(y == -2.0);
    }
    SECTION("quarter rotation") {
        auto [x, y] = transform::wheel_frame_velocity(Vec3(1.0, 0.0, 0.0), M_PI / 2.0);
        CHECK(x == Approx(0.0).margin(1e-15));
        CHECK(y == Approx(-1.0));
    }
    SECTION("hand rotation") {
        auto [x, y] = transform::wheel_frame_velocity(Vec3(10.0, 1.0, 0.0), 0.1);
        CHECK(x == Approx(10.0 * std::cos(0.1) + 1.0 * std::sin(0.1)));
        CHECK(y == Approx(-10.0 * std::sin(0.1) + 1.0 * std::cos(0.1)));
    }
}

TEST_CASE("transformation properties") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> d(-20.0, 20.0), w(-2.0, 2.0);
    const std::array<Vec3, 4> r = {Vec3(1.45, 0.77, 0.0), Vec3(1.45, -0.77, 0.0),
                                   Vec3(-1.25, 0.77, 0.0), Vec3(-1.25, -0.77, 0.0)};

    SECTION("planar motion reconstructible from any three wheels (gamma=0)") {
        for (int k = 0; k < 200; ++k) {
            const Vec3 v(d(rng), d(rng), 0.0);
            const Vec3 omega(0.0, 0.0, w(rng));
            std::array<Vec3, 4> vb;
            for (int i = 0; i < 4; ++i)
                vb[i] = transform::cp_to_wheel_velocity(v, omega, r[i], 0.0);
            // choose any 3 wheels; solve [vx, vy, psidot] from their x,y components
            for (int drop = 0; drop < 4; ++drop) {
                Eigen::MatrixXd a(6, 3);
                Eigen::VectorXd b(6);
                int rix = 0;
                for (int i = 0; i < 4; ++i) {
                    if (i == drop) continue;
                    // vx_b = vx - psidot*ry ; vy_b = vy + psidot*rx
                    a.row(2 * rix) << 1.0, 0.0, -r[i].y();
                    b(2 * rix) = vb[i].x();
                    a.row(2 * rix + 1) << 0.0, 1.0, r[i].x();
                    b(2 * rix + 1) = vb[i].y();
                    ++rix;
                }
                const Eigen::Vector3d sol =
                    a.colPivHouseholderQr().solve(b);
                CHECK(sol(0) == Approx(v.x()).margin(1e-9));
                CHECK(sol(1) == Approx(v.y()).margin(1e-9));
                CHECK(sol(2) == Approx(omega.z()).margin(1e-9));
            }
        }
    }

    SECTION("linearity in (v, omega) at fixed gamma") {
        for (double gamma : {0.0, 3.0}) {
            for (int k = 0; k < 50; ++k) {
                const Vec3 v1(d(rng), d(rng), 0.0), v2(d(rng), d(rng), 0.0);
                const Vec3 w1(0.0, 0.0, w(rng)), w2(0.0, 0.0, w(rng));
                const Vec3 lhs =
                    transform::cp_to_wheel_velocity(v1 + v2, w1 + w2, r[0], gamma);
                const Vec3 rhs = transform::cp_to_wheel_velocity(v1, w1, r[0], gamma) +
                                 transform::cp_to_wheel_velocity(v2, w2, r[0], gamma);
                CHECK(lhs.isApprox(rhs, 1e-12));
            }
        }
    }

    SECTION("left/right antisymmetry of yaw-induced x components") {
        const Vec3 v(15.0, 0.0, 0.0);
        const Vec3 omega(0.0, 0.0, 0.8);
        for (double gamma : {0.0, 10.0}) {
            const double dl =
                transform::cp_to_wheel_velocity(v, omega, r[0], gamma).x() - v.x();
            const double dr =
                transform::cp_to_wheel_velocity(v, omega, r[1], gamma).x() - v.x();
            CHECK(dl == Approx(-dr));
        }
    }
}
