#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "twintrack/baseline.hpp"
#include "twintrack/controller.hpp"
#include "twintrack/errors.hpp"
#include "twintrack/trace.hpp"
#include "twintrack/vehicle.hpp"

namespace twintrack {

/// Piecewise timeline over [0, duration]: sample-and-hold or linear
/// interpolation between (t, value) breakpoints.
struct Timeline {
    enum class Interp { Hold, Linear };
    Interp interp = Interp::Hold;
    std::vector<std::pair<double, double>> points;

    static Timeline constant(double value) {
        Timeline tl;
        tl.points = {{0.0, value}};
        return tl;
    }

    double at(double t) const {
        if (points.empty()) return 0.0;
        if (t <= points.front().first) return points.front().second;
        if (t >= points.back().first) return points.back().second;
        auto it = std::upper_bound(points.begin(), points.end(), t,
                                   [](double v, const auto& p) { return v < p.first; });
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        if (interp == Interp::Hold) return lo.second;
        const double f = (t - lo.first) / (hi.first - lo.first);
        return lo.second + f * (hi.second - lo.second);
    }

    void validate(double duration, const std::string& path) const {
        if (points.empty()) throw ConfigError(path + ": timeline has no points");
        for (size_t i = 1; i < points.size(); ++i)
            if (!(points[i].first > points[i - 1].first))
                throw ConfigError(path + ": breakpoint times must be strictly increasing");
        if (points.front().first > 0.0)
            throw ConfigError(path + ": coverage gap [0, " +
                              std::to_string(points.front().first) + ")");
        if (interp == Interp::Linear && points.back().first < duration)
            throw ConfigError(path + ": coverage gap (" +
                              std::to_string(points.back().first) + ", " +
                              std::to_string(duration) + "]");
    }
};

enum class ControllerKind { Proposed, Baseline };

struct ScenarioConfig {
    std::string name = "scenario";
    double duration = 1.0;
    double dt = 0.001;   // plant step
    double ts = 0.01;    // controller sample time
    DriveMode mode = DriveMode::SelfDriving;
    ControllerKind controller = ControllerKind::Proposed;
    double gamma = 0.0;
    bool baseline_reallocate = false;

    PlantParams params = reference_params();
    ControllerGains gains = default_gains(reference_params().tire);
    baseline::BaselineGains baseline_gains{};

    double initial_vx = 0.0;

    Timeline v_ref = Timeline::constant(0.0);
    Timeline a_ref = Timeline::constant(0.0);
    Timeline yaw_rate_ref = Timeline::constant(0.0);
    Timeline delta = Timeline::constant(0.0);
    std::array<Timeline, kNumWheels> eps{Timeline::constant(1.0), Timeline::constant(1.0),
                                         Timeline::constant(1.0), Timeline::constant(1.0)};
    std::array<Timeline, kNumWheels> mu{Timeline::constant(1.0), Timeline::constant(1.0),
                                        Timeline::constant(1.0), Timeline::constant(1.0)};

    void validate() const {
        if (!(duration > 0.0)) throw ConfigError("duration: must be > 0");
        if (!(dt > 0.0)) throw ConfigError("dt: must be > 0");
        const double ratio = ts / dt;
        if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1.0)
            throw ConfigError("ts: plant dt must divide controller ts");
        params.validate();
        gains.validate();
        static const char* wheel_names[] = {"fl", "fr", "rl", "rr"};
        v_ref.validate(duration, "timelines.v_ref");
        a_ref.validate(duration, "timelines.a_ref");
        yaw_rate_ref.validate(duration, "timelines.yaw_rate_ref");
        delta.validate(duration, "timelines.delta");
        for (int i = 0; i < kNumWheels; ++i) {
            eps[i].validate(duration, std::string("timelines.eps.") + wheel_names[i]);
            mu[i].validate(duration, std::string("timelines.mu.") + wheel_names[i]);
        }
    }
};

struct Metrics {
    double rms_v_err = 0.0;
    double rms_yaw_err = 0.0;
    double max_abs_lambda = 0.0;
    double max_abs_beta = 0.0;
    std::array<double, kNumWheels> torque_energy{};  // integral of tau^2 dt
};

inline Metrics compute_metrics(const Trace& trace, double ts) {
    Metrics m;
    double sv = 0.0, sy = 0.0;
    for (const auto& r : trace.rows) {
        sv += (r.vx - r.vx_ref) * (r.vx - r.vx_ref);
        sy += (r.yaw_rate - r.yaw_rate_ref) * (r.yaw_rate - r.yaw_rate_ref);
        m.max_abs_beta = std::max(m.max_abs_beta, std::abs(r.beta));
        for (int i = 0; i < kNumWheels; ++i) {
            m.max_abs_lambda = std::max(m.max_abs_lambda, std::abs(r.lambda[i]));
            m.torque_energy[i] += r.tau[i] * r.tau[i] * ts;
        }
    }
    const double n = std::max<double>(1.0, static_cast<double>(trace.rows.size()));
    m.rms_v_err = std::sqrt(sv / n);
    m.rms_yaw_err = std::sqrt(sy / n);
    return m;
}

namespace harness {

inline TireInterfaceState iface_at(const ScenarioConfig& cfg, double t) {
    TireInterfaceState s;
    for (int i = 0; i < kNumWheels; ++i) {
        s.eps[i] = cfg.eps[i].at(t);
        s.mu[i] = cfg.mu[i].at(t);
    }
    return s;
}

/// Deterministic closed-loop simulation of one scenario: plant at dt,
/// controller zero-order-held at ts, trace sampled at ts.
inline Trace run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();

    VehicleState state;
    state.v = Vec3(cfg.initial_vx, 0.0, 0.0);
    state.wheel_speed.fill(cfg.initial_vx / cfg.params.tire.wheel_radius);

    ControllerState ctrl;
    baseline::BaselineState base;
    PlantInput input;

    // the baseline is fed the nominal friction (t = 0), not the disturbed
    // surface: it has no channel for mid-run surface estimation
    const TireInterfaceState nominal = iface_at(cfg, 0.0);

    const int ctrl_every = static_cast<int>(std::round(cfg.ts / cfg.dt));
    const int n_steps = static_cast<int>(std::round(cfg.duration / cfg.dt));

    Trace trace;
    trace.rows.reserve(static_cast<size_t>(n_steps / ctrl_every) + 1);

    for (int k = 0; k <= n_steps; ++k) {
        const double t = k * cfg.dt;
        const TireInterfaceState iface = iface_at(cfg, t);

        if (k % ctrl_every == 0) {
            // sensor snapshot from the current plant evaluation
            const model::PlantDerivs d = model::evaluate(state, input, iface, cfg.params);

            Measurements meas;
            meas.v = state.v;
            meas.omega = state.omega;
            meas.ax = d.dv.x();
            meas.yaw_accel = d.domega.z();
            meas.wheel_speed = state.wheel_speed;

            MotionReference refs;
            refs.mode = cfg.mode;
            refs.gamma = cfg.gamma;
            refs.v_ref = cfg.v_ref.at(t);
            refs.a_ref = cfg.a_ref.at(t);
            refs.yaw_rate_ref = cfg.yaw_rate_ref.at(t);
            refs.delta = cfg.delta.at(t);

            if (cfg.controller == ControllerKind::Proposed) {
                input.tau_ref = controller::controller_update(refs, meas, cfg.params,
                                                              cfg.gains, ctrl);
            } else {
                input.tau_ref = baseline::baseline_update(
                    refs, meas, d.diag.loads.fz, nominal.mu, cfg.params,
                    cfg.baseline_gains, base, cfg.baseline_reallocate);
            }
            input.delta = refs.delta;

            TraceRow row;
            row.t = t;
            row.vx = state.v.x();
            row.vy = state.v.y();
            row.yaw_rate = state.omega.z();
            row.beta = std::abs(state.v.x()) > 1e-9 ? std::atan(state.v.y() / state.v.x()) : 0.0;
            row.ax = d.dv.x();
            row.vx_ref = refs.v_ref;
            row.ax_ref = cfg.controller == ControllerKind::Proposed
                             ? ctrl.a_cp_cmd
                             : refs.a_ref;
            row.yaw_rate_ref = refs.yaw_rate_ref;
            row.delta = refs.delta;
            row.arbitration = ctrl.limit_latched ? 1.0 : 0.0;
            for (int i = 0; i < kNumWheels; ++i) {
                const Vec3& r = cfg.params.vehicle.wheel_pos[i];
                row.ax_wheel[i] = d.dv.x() - d.domega.z() * r.y() -
                                  state.omega.z() * state.omega.z() * r.x();
                row.tau[i] = state.torque[i];
                row.tau_ref[i] = input.tau_ref[i];
                row.lambda[i] = d.diag.lambda[i];
                row.lambda_ref[i] = cfg.controller == ControllerKind::Proposed
                                        ? ctrl.lambda_ref[i]
                                        : 0.0;
                row.eps[i] = iface.eps[i];
                row.fz[i] = d.diag.loads.fz[i];
                row.wheel_speed[i] = state.wheel_speed[i];
                row.a_lat[i] = ctrl.a_lat[i];
            }
            trace.rows.push_back(row);
        }

        if (k < n_steps) state = model::step(state, input, iface, cfg.params, cfg.dt, t);
    }
    return trace;
}

struct ComparisonRow {
    std::string metric;
    std::vector<double> values;
    int winner = 0;  // index of the best run (smaller is better)
};

/// Paired metric table over runs sharing a scenario timeline.
inline std::vector<ComparisonRow> compare_runs(const std::vector<Trace>& traces,
                                               double ts) {
    if (traces.size() < 2)
        throw ConfigError("compare_runs: need at least two traces");
    for (size_t k = 1; k < traces.size(); ++k) {
        if (traces[k].rows.size() != traces[0].rows.size())
            throw ConfigError("compare_runs: mismatched timelines (row counts differ)");
        for (size_t j = 0; j < traces[0].rows.size(); ++j)
            if (std::abs(traces[k].rows[j].t - traces[0].rows[j].t) > 1e-12)
                throw ConfigError("compare_runs: mismatched timelines (sample times differ)");
    }

    std::vector<Metrics> ms;
    for (const auto& tr : traces) ms.push_back(compute_metrics(tr, ts));

    std::vector<ComparisonRow> report;
    auto add = [&](const std::string& name, auto getter) {
        ComparisonRow row;
        row.metric = name;
        for (const auto& m : ms) row.values.push_back(getter(m));
        row.winner = static_cast<int>(
            std::min_element(row.values.begin(), row.values.end()) - row.values.begin());
        report.push_back(row);
    };
    add("rms_v_err", [](const Metrics& m) { return m.rms_v_err; });
    add("rms_yaw_err", [](const Metrics& m) { return m.rms_yaw_err; });
    add("max_abs_lambda", [](const Metrics& m) { return m.max_abs_lambda; });
    add("max_abs_beta", [](const Metrics& m) { return m.max_abs_beta; });
    add("torque_energy_total", [](const Metrics& m) {
        double s = 0.0;
        for (double e : m.torque_energy) s += e;
        return s;
    });
    return report;
}

}  // namespace harness
}  // namespace twintrack
