#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "twintrack/errors.hpp"
#include "twintrack/params.hpp"

namespace twintrack {

/// One controller-rate sample of the closed-loop run: CP block, per-wheel
/// block, and controller internals. Column order is fixed (see header()).
struct TraceRow {
    double t = 0.0;
    // CP block
    double vx = 0.0, vy = 0.0, yaw_rate = 0.0, beta = 0.0, ax = 0.0;
    double vx_ref = 0.0, ax_ref = 0.0, yaw_rate_ref = 0.0, delta = 0.0;
    double arbitration = 0.0;
    // per-wheel block
    std::array<double, kNumWheels> ax_wheel{};
    std::array<double, kNumWheels> tau{};
    std::array<double, kNumWheels> tau_ref{};
    std::array<double, kNumWheels> lambda{};
    std::array<double, kNumWheels> lambda_ref{};
    std::array<double, kNumWheels> eps{};
    std::array<double, kNumWheels> fz{};
    std::array<double, kNumWheels> wheel_speed{};
    std::array<double, kNumWheels> a_lat{};
};

struct Trace {
    std::vector<TraceRow> rows;

    static std::string header() {
        std::string h = "t,vx,vy,yaw_rate,beta,ax,vx_ref,ax_ref,yaw_rate_ref,delta,arb";
        const char* wheel_cols[] = {"ax_w",  "tau", "tau_ref", "lambda", "lambda_ref",
                                    "eps",   "fz",  "omega",   "a_lat"};
        for (const char* col : wheel_cols)
            for (int i = 1; i <= kNumWheels; ++i)
                h += "," + std::string(col) + std::to_string(i);
        return h;
    }

    static std::vector<double> flatten(const TraceRow& r) {
        std::vector<double> v = {r.t,      r.vx,     r.vy,    r.yaw_rate, r.beta,
                                 r.ax,     r.vx_ref, r.ax_ref, r.yaw_rate_ref,
                                 r.delta,  r.arbitration};
        for (const auto* arr : {&r.ax_wheel, &r.tau, &r.tau_ref, &r.lambda,
                                &r.lambda_ref, &r.eps, &r.fz, &r.wheel_speed, &r.a_lat})
            v.insert(v.end(), arr->begin(), arr->end());
        return v;
    }

    static TraceRow unflatten(const std::vector<double>& v) {
        TraceRow r;
        size_t k = 0;
        r.t = v[k++]; r.vx = v[k++]; r.vy = v[k++]; r.yaw_rate = v[k++];
        r.beta = v[k++]; r.ax = v[k++]; r.vx_ref = v[k++]; r.ax_ref = v[k++];
        r.yaw_rate_ref = v[k++]; r.delta = v[k++]; r.arbitration = v[k++];
        for (auto* arr : {&r.ax_wheel, &r.tau, &r.tau_ref, &r.lambda, &r.lambda_ref,
                          &r.eps, &r.fz, &r.wheel_speed, &r.a_lat})
            for (int i = 0; i < kNumWheels; ++i) (*arr)[i] = v[k++];
        return r;
    }

    static size_t column_count() { return 11 + 9 * kNumWheels; }
};

/// CSV persistence: header row, decimal dot, %.17g values (lossless
/// double round trip), newline-terminated records.
inline void write_trace(const Trace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("write_trace: cannot open " + path);
    out << Trace::header() << "\n";
    char buf[32];
    for (const auto& row : trace.rows) {
        const auto vals = Trace::flatten(row);
        for (size_t i = 0; i < vals.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", vals[i]);
            if (i) out << ',';
            out << buf;
        }
        out << "\n";
    }
}

inline Trace read_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("read_trace: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != Trace::header())
        throw ConfigError("read_trace: bad or missing header in " + path);
    Trace trace;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> vals;
        vals.reserve(Trace::column_count());
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() != Trace::column_count())
            throw ConfigError("read_trace: wrong column count in " + path);
        trace.rows.push_back(Trace::unflatten(vals));
    }
    return trace;
}

}  // namespace twintrack
