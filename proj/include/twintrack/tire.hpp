#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "twintrack/errors.hpp"
#include "twintrack/params.hpp"

namespace twintrack {

/// Per-wheel tire-interface scaling (eps) and friction (mu), varied by
/// scenario timelines to model surface and load changes.
struct TireInterfaceState {
    std::array<double, kNumWheels> eps{1.0, 1.0, 1.0, 1.0};
    std::array<double, kNumWheels> mu{1.0, 1.0, 1.0, 1.0};
};

}  // namespace twintrack

namespace twintrack::tire {

/// Longitudinal slip ratio. Callers are responsible for the low-speed
/// guard; a fully degenerate input is a hard error so misuse is loud.
inline double slip_ratio(double omega, double wheel_radius, double vx_wheel) {
    const double circ = omega * wheel_radius;
    const double denom = std::max(std::abs(circ), std::abs(vx_wheel));
    if (denom <= 0.0)
        throw UndefinedSlip("slip_ratio: wheel and hub speed both zero");
    return (circ - vx_wheel) / denom;
}

inline double slip_angle(double vx, double vy) {
    if (vx == 0.0) throw UndefinedSlip("slip_angle: zero longitudinal hub speed");
    return -std::atan(vy / std::abs(vx));
}

/// Magic-formula shape factor, normalized so that the peak value is d.
inline double magic_formula(double slip, const PacejkaCoeffs& p) {
    const double bs = p.b * slip;
    return p.d * std::sin(p.c * std::atan(bs - p.e * (bs - std::atan(bs))));
}

/// Longitudinal tire force with the tire-interface scaling factor eps.
inline double pacejka_longitudinal(double lambda, double fz, double mu, double eps,
                                   const TireParams& p) {
    // eps multiplies last so the eps = 1 evaluation is recovered bit-exactly
    return eps * (mu * fz * magic_formula(lambda, p.longitudinal));
}

/// Lateral tire force. eps does not apply here (see epsilon_scales_lateral
/// on PlantParams for the optional extension).
inline double pacejka_lateral(double alpha, double fz, double mu, const TireParams& p) {
    return mu * fz * magic_formula(alpha, p.lateral);
}

/// Joint rescaling of the raw force pair onto the friction ellipse
/// (Kamm's circle). Direction of the combined force is preserved.
inline std::pair<double, double> friction_ellipse(double fx_raw, double fy_raw,
                                                  double fz, double mu,
                                                  const TireParams& p) {
    if (fz <= 0.0 || mu <= 0.0) return {0.0, 0.0};  // no transmissible force
    const double dx = mu * p.longitudinal.d;
    const double dy = mu * p.lateral.d;
    const double combined = std::sqrt((fx_raw * fx_raw) / (dx * dx) +
                                      (fy_raw * fy_raw) / (dy * dy));
    const double cap = mu * fz;
    if (combined <= cap) return {fx_raw, fy_raw};
    const double scale = cap / combined;
    return {fx_raw * scale, fy_raw * scale};
}

/// Locates the interior maximum of the longitudinal slip curve on (0, 1)
/// by golden-section search. Returns (lambda_max, peak force).
inline std::pair<double, double> slip_curve_peak(const TireParams& p, double mu,
                                                 double fz) {
    const auto f = [&](double lambda) {
        return pacejka_longitudinal(lambda, fz, mu, 1.0, p);
    };
    // bracket the maximum on a coarse grid first
    constexpr int kGrid = 200;
    double best_f = -1.0;
    int best_i = -1;
    for (int i = 1; i < kGrid; ++i) {
        const double l = static_cast<double>(i) / kGrid;
        const double v = f(l);
        if (v > best_f) {
            best_f = v;
            best_i = i;
        }
    }
    if (best_i <= 1 || best_i >= kGrid - 1)
        throw InvalidTireParams("slip_curve_peak: no interior maximum on (0, 1)");
    double lo = (best_i - 1.0) / kGrid;
    double hi = (best_i + 1.0) / kGrid;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - gr * (hi - lo);
    double b = lo + gr * (hi - lo);
    double fa = f(a), fb = f(b);
    while (hi - lo > 1e-6) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + gr * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - gr * (hi - lo);
            fa = f(a);
        }
    }
    const double lmax = 0.5 * (lo + hi);
    return {lmax, f(lmax)};
}

/// Normalized slope of the slip curve at lambda = 0 (bilinear tire
/// stiffness): d(Fx/(mu Fz))/dlambda = B C D.
inline double linear_tire_stiffness(const TireParams& p) {
    return p.longitudinal.b * p.longitudinal.c * p.longitudinal.d;
}

}  // namespace twintrack::tire
