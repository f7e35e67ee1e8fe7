#pragma once

#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "twintrack/errors.hpp"
#include "twintrack/scenario.hpp"

namespace twintrack::config {

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                           const std::string& path) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key))
            throw ConfigError(path + "." + key + ": unknown key");
    }
}

inline double require_number(const json& obj, const std::string& key,
                             const std::string& path) {
    if (!obj.contains(key))
        throw ConfigError(path + "." + key + ": missing (expected number)");
    if (!obj[key].is_number())
        throw ConfigError(path + "." + key + ": expected number");
    return obj[key].get<double>();
}

inline double optional_number(const json& obj, const std::string& key, double fallback,
                              const std::string& path) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw ConfigError(path + "." + key + ": expected number");
    return obj[key].get<double>();
}

inline Timeline parse_timeline(const json& node, const std::string& path) {
    if (!node.is_object()) throw ConfigError(path + ": expected object");
    reject_unknown(node, {"interp", "points"}, path);
    Timeline tl;
    if (!node.contains("interp") || !node["interp"].is_string())
        throw ConfigError(path + ".interp: expected \"hold\" or \"linear\"");
    const std::string interp = node["interp"].get<std::string>();
    if (interp == "hold")
        tl.interp = Timeline::Interp::Hold;
    else if (interp == "linear")
        tl.interp = Timeline::Interp::Linear;
    else
        throw ConfigError(path + ".interp: expected \"hold\" or \"linear\"");
    if (!node.contains("points") || !node["points"].is_array())
        throw ConfigError(path + ".points: expected array of [t, value] pairs");
    for (const auto& p : node["points"]) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw ConfigError(path + ".points: expected array of [t, value] pairs");
        tl.points.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return tl;
}

inline void parse_gains(const json& node, ControllerGains& g, const std::string& path) {
    reject_unknown(node,
                   {"slip_kp", "slip_ki", "slip_kd", "slip_nf", "accel_kp", "accel_ki",
                    "vel_kp", "lambda_max", "zeta", "theta", "hysteresis"},
                   path);
    g.slip_kp = optional_number(node, "slip_kp", g.slip_kp, path);
    g.slip_ki = optional_number(node, "slip_ki", g.slip_ki, path);
    g.slip_kd = optional_number(node, "slip_kd", g.slip_kd, path);
    g.slip_nf = optional_number(node, "slip_nf", g.slip_nf, path);
    g.accel_kp = optional_number(node, "accel_kp", g.accel_kp, path);
    g.accel_ki = optional_number(node, "accel_ki", g.accel_ki, path);
    g.vel_kp = optional_number(node, "vel_kp", g.vel_kp, path);
    g.lambda_max = optional_number(node, "lambda_max", g.lambda_max, path);
    g.zeta = optional_number(node, "zeta", g.zeta, path);
    g.theta = optional_number(node, "theta", g.theta, path);
    g.hysteresis = optional_number(node, "hysteresis", g.hysteresis, path);
}

}  // namespace detail

/// Parses a scenario config from JSON text with strict unknown-key
/// rejection; errors carry the offending field path.
inline ScenarioConfig parse_config(const nlohmann::json& root) {
    using detail::reject_unknown;
    if (!root.is_object()) throw ConfigError("config: expected top-level object");
    reject_unknown(root,
                   {"name", "duration", "dt", "ts", "mode", "controller", "gamma",
                    "vehicle", "baseline_reallocate", "initial", "timelines", "gains"},
                   "config");

    ScenarioConfig cfg;
    if (root.contains("name")) {
        if (!root["name"].is_string()) throw ConfigError("config.name: expected string");
        cfg.name = root["name"].get<std::string>();
    }
    cfg.duration = detail::require_number(root, "duration", "config");
    cfg.dt = detail::optional_number(root, "dt", cfg.dt, "config");
    cfg.ts = detail::optional_number(root, "ts", cfg.ts, "config");
    cfg.gamma = detail::optional_number(root, "gamma", cfg.gamma, "config");

    if (root.contains("mode")) {
        const std::string m = root["mode"].is_string() ? root["mode"].get<std::string>() : "";
        if (m == "self_driving")
            cfg.mode = DriveMode::SelfDriving;
        else if (m == "driver")
            cfg.mode = DriveMode::DriverInLoop;
        else
            throw ConfigError("config.mode: expected \"self_driving\" or \"driver\"");
    }
    if (root.contains("controller")) {
        const std::string c =
            root["controller"].is_string() ? root["controller"].get<std::string>() : "";
        if (c == "proposed")
            cfg.controller = ControllerKind::Proposed;
        else if (c == "baseline")
            cfg.controller = ControllerKind::Baseline;
        else
            throw ConfigError("config.controller: expected \"proposed\" or \"baseline\"");
    }
    if (root.contains("vehicle")) {
        const std::string v =
            root["vehicle"].is_string() ? root["vehicle"].get<std::string>() : "";
        if (v != "reference")
            throw ConfigError("config.vehicle: only the \"reference\" parameter set is shipped");
    }
    if (root.contains("baseline_reallocate")) {
        if (!root["baseline_reallocate"].is_boolean())
            throw ConfigError("config.baseline_reallocate: expected bool");
        cfg.baseline_reallocate = root["baseline_reallocate"].get<bool>();
    }
    if (root.contains("initial")) {
        reject_unknown(root["initial"], {"vx"}, "config.initial");
        cfg.initial_vx = detail::optional_number(root["initial"], "vx", 0.0, "config.initial");
    }
    if (root.contains("gains")) detail::parse_gains(root["gains"], cfg.gains, "config.gains");

    if (root.contains("timelines")) {
        const auto& tl = root["timelines"];
        reject_unknown(tl, {"v_ref", "a_ref", "yaw_rate_ref", "delta", "eps", "mu"},
                       "config.timelines");
        if (tl.contains("v_ref"))
            cfg.v_ref = detail::parse_timeline(tl["v_ref"], "config.timelines.v_ref");
        if (tl.contains("a_ref"))
            cfg.a_ref = detail::parse_timeline(tl["a_ref"], "config.timelines.a_ref");
        if (tl.contains("yaw_rate_ref"))
            cfg.yaw_rate_ref =
                detail::parse_timeline(tl["yaw_rate_ref"], "config.timelines.yaw_rate_ref");
        if (tl.contains("delta"))
            cfg.delta = detail::parse_timeline(tl["delta"], "config.timelines.delta");
        static const char* wheel_names[] = {"fl", "fr", "rl", "rr"};
        for (const char* group : {"eps", "mu"}) {
            if (!tl.contains(group)) continue;
            reject_unknown(tl[group], {"fl", "fr", "rl", "rr"},
                           std::string("config.timelines.") + group);
            for (int i = 0; i < kNumWheels; ++i) {
                if (!tl[group].contains(wheel_names[i])) continue;
                auto parsed = detail::parse_timeline(
                    tl[group][wheel_names[i]],
                    std::string("config.timelines.") + group + "." + wheel_names[i]);
                (std::string(group) == "eps" ? cfg.eps : cfg.mu)[i] = parsed;
            }
        }
    }

    cfg.validate();
    return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("load_config: cannot open " + path);
    nlohmann::json root;
    try {
        in >> root;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("load_config: " + path + ": " + e.what());
    }
    return parse_config(root);
}

}  // namespace twintrack::config
