#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "twintrack/config.hpp"
#include "twintrack/scenario.hpp"
#include "twintrack/trace.hpp"

using namespace twintrack;
using Catch::Approx;

namespace {

std::string temp_path(const char* name) {
    return std::string("/tmp/twintrack_test_") + name;
}

ScenarioConfig cruise_scenario(double vx = 15.0, double duration = 1.0) {
    ScenarioConfig cfg;
    cfg.duration = duration;
    cfg.initial_vx = vx;
    cfg.v_ref = Timeline::constant(vx);
    return cfg;
}

}  // namespace

TEST_CASE("timeline sampling") {
    Timeline tl;
    tl.points = {{0.0, 1.0}, {1.0, 3.0}, {2.0, 2.0}};

    SECTION("hold interpolation") {
        tl.interp = Timeline::Interp::Hold;
        CHECK(tl.at(-1.0) == 1.0);
        CHECK(tl.at(0.5) == 1.0);
        CHECK(tl.at(1.0) == 3.0);
        CHECK(tl.at(1.5) == 3.0);
        CHECK(tl.at(5.0) == 2.0);
    }
    SECTION("linear interpolation") {
        tl.interp = Timeline::Interp::Linear;
        CHECK(tl.at(0.5) == Approx(2.0));
        CHECK(tl.at(1.5) == Approx(2.5));
        CHECK(tl.at(5.0) == 2.0);  // held beyond the last point
    }
    SECTION("validation catches gaps and disorder") {
        Timeline bad;
        CHECK_THROWS_AS(bad.validate(2.0, "x"), ConfigError);
        bad.points = {{0.5, 1.0}};
        CHECK_THROWS_MATCHES(bad.validate(2.0, "x"), ConfigError,
                             Catch::Matchers::MessageMatches(
                                 Catch::Matchers::ContainsSubstring("coverage gap")));
        bad.points = {{0.0, 1.0}, {0.0, 2.0}};
        CHECK_THROWS_AS(bad.validate(2.0, "x"), ConfigError);
        bad.points = {{0.0, 1.0}, {1.0, 2.0}};
        bad.interp = Timeline::Interp::Linear;
        CHECK_THROWS_MATCHES(bad.validate(2.0, "x"), ConfigError,
                             Catch::Matchers::MessageMatches(
                                 Catch::Matchers::ContainsSubstring("coverage gap")));
    }
}

TEST_CASE("config parsing") {
    SECTION("minimal config") {
        const auto cfg = config::parse_config(nlohmann::json{{"duration", 2.0}});
        CHECK(cfg.duration == 2.0);
        CHECK(cfg.dt == 0.001);
        CHECK(cfg.mode == DriveMode::SelfDriving);
        CHECK(cfg.controller == ControllerKind::Proposed);
    }

    SECTION("unknown keys are rejected with the field path") {
        nlohmann::json j{{"duration", 1.0}, {"durration", 2.0}};
        CHECK_THROWS_MATCHES(config::parse_config(j), ConfigError,
                             Catch::Matchers::MessageMatches(
                                 Catch::Matchers::ContainsSubstring("config.durration")));
        nlohmann::json j2{{"duration", 1.0},
                          {"timelines", {{"vref", {{"interp", "hold"},
                                                   {"points", {{0.0, 1.0}}}}}}}};
        CHECK_THROWS_MATCHES(config::parse_config(j2), ConfigError,
                             Catch::Matchers::MessageMatches(
                                 Catch::Matchers::ContainsSubstring("config.timelines.vref")));
    }

    SECTION("nested timeline and gain parsing") {
        nlohmann::json j{
            {"duration", 3.0},
            {"mode", "driver"},
            {"controller", "baseline"},
            {"gamma", 5.0},
            {"gains", {{"vel_kp", 2.5}}},
            {"timelines",
             {{"a_ref", {{"interp", "linear"}, {"points", {{0.0, 0.0}, {3.0, 2.0}}}}},
              {"eps", {{"fl", {{"interp", "hold"}, {"points", {{0.0, 0.7}}}}}}}}}};
        const auto cfg = config::parse_config(j);
        CHECK(cfg.mode == DriveMode::DriverInLoop);
        CHECK(cfg.controller == ControllerKind::Baseline);
        CHECK(cfg.gamma == 5.0);
        CHECK(cfg.gains.vel_kp == 2.5);
        CHECK(cfg.a_ref.at(1.5) == Approx(1.0));
        CHECK(cfg.eps[0].at(10.0) == 0.7);
        CHECK(cfg.eps[1].at(10.0) == 1.0);
    }

    SECTION("type errors carry the path") {
        nlohmann::json j{{"duration", "long"}};
        CHECK_THROWS_MATCHES(config::parse_config(j), ConfigError,
                             Catch::Matchers::MessageMatches(
                                 Catch::Matchers::ContainsSubstring("config.duration")));
    }

    SECTION("dt must divide ts") {
        nlohmann::json j{{"duration", 1.0}, {"dt", 0.0007}};
        CHECK_THROWS_AS(config::parse_config(j), ConfigError);
    }

    SECTION("file loading errors") {
        CHECK_THROWS_AS(config::load_config("/nonexistent/path.json"), ConfigError);
        const std::string path = temp_path("bad.json");
        std::ofstream(path) << "{ not json";
        CHECK_THROWS_AS(config::load_config(path), ConfigError);
        std::remove(path.c_str());
    }
}

TEST_CASE("trace CSV round trip") {
    Trace tr;
    for (int k = 0; k < 5; ++k) {
        TraceRow r;
        r.t = k * 0.01;
        r.vx = 15.0 + 0.1 * k;
        r.beta = -0.001 * k;
        for (int i = 0; i < kNumWheels; ++i) {
            r.tau[i] = 100.0 * i + k + 1.0 / 3.0;
            r.lambda[i] = 0.01 * i - 1e-17;
        }
        tr.rows.push_back(r);
    }
    const std::string path = temp_path("trace.csv");
    write_trace(tr, path);
    const Trace back = read_trace(path);

    REQUIRE(back.rows.size() == tr.rows.size());
    for (size_t k = 0; k < tr.rows.size(); ++k) {
        const auto a = Trace::flatten(tr.rows[k]);
        const auto b = Trace::flatten(back.rows[k]);
        for (size_t j = 0; j < a.size(); ++j) CHECK(a[j] == b[j]);  // bit exact
    }

    SECTION("re-serialization is byte identical") {
        const std::string path2 = temp_path("trace2.csv");
        write_trace(back, path2);
        std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
        std::string s1((std::istreambuf_iterator<char>(f1)), {});
        std::string s2((std::istreambuf_iterator<char>(f2)), {});
        CHECK(s1 == s2);
        std::remove(path2.c_str());
    }
    SECTION("corrupted header is rejected") {
        std::ofstream(path, std::ios::binary) << "time,stuff\n1,2\n";
        CHECK_THROWS_AS(read_trace(path), ConfigError);
    }
    std::remove(path.c_str());
}

TEST_CASE("scenario runs") {
    SECTION("steady cruise holds speed and near-zero slip") {
        const auto cfg = cruise_scenario(15.0, 2.0);
        const Trace tr = harness::run_scenario(cfg);
        REQUIRE(tr.rows.size() == 201);  // 2 s at Ts = 10 ms, inclusive
        const auto& last = tr.rows.back();
        CHECK(last.vx == Approx(15.0).margin(0.2));
        for (int i = 0; i < kNumWheels; ++i) CHECK(std::abs(last.lambda[i]) < 0.01);
    }

    SECTION("runs are bit-for-bit reproducible") {
        const auto cfg = cruise_scenario(12.0, 1.0);
        const Trace a = harness::run_scenario(cfg);
        const Trace b = harness::run_scenario(cfg);
        REQUIRE(a.rows.size() == b.rows.size());
        for (size_t k = 0; k < a.rows.size(); ++k)
            CHECK(Trace::flatten(a.rows[k]) == Trace::flatten(b.rows[k]));
    }

    SECTION("metrics reflect the trace") {
        auto cfg = cruise_scenario(10.0, 1.0);
        cfg.v_ref = Timeline::constant(11.0);  // constant 1 m/s error at t = 0
        const Trace tr = harness::run_scenario(cfg);
        const Metrics m = compute_metrics(tr, cfg.ts);
        CHECK(m.rms_v_err > 0.0);
        CHECK(m.rms_v_err < 1.0);  // closes toward the reference
        CHECK(m.max_abs_lambda < cfg.gains.lambda_max + 0.02);
    }

    SECTION("compare_runs rejects mismatched timelines and ranks runs") {
        const auto cfg = cruise_scenario(15.0, 1.0);
        auto cfg_short = cfg;
        cfg_short.duration = 0.5;
        const Trace a = harness::run_scenario(cfg);
        CHECK_THROWS_AS(
            harness::compare_runs({a, harness::run_scenario(cfg_short)}, cfg.ts),
            ConfigError);

        auto cfg_err = cfg;
        cfg_err.v_ref = Timeline::constant(17.0);
        const Trace b = harness::run_scenario(cfg_err);
        const auto report = harness::compare_runs({a, b}, cfg.ts);
        REQUIRE_FALSE(report.empty());
        CHECK(report[0].metric == "rms_v_err");
        CHECK(report[0].winner == 0);
    }
}
