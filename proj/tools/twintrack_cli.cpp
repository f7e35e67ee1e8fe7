// Command-line front end: scenario runs, run comparison, linearization
// tables, and gamma sweeps over the scenario configs in configs/.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "twintrack/twintrack.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitCheckFailed = 4;

void print_metrics(const std::string& name, const twintrack::Metrics& m) {
    std::printf("%-28s rms_v=%.4f m/s  rms_yaw=%.5f rad/s  max|lambda|=%.4f  max|beta|=%.4f\n",
                name.c_str(), m.rms_v_err, m.rms_yaw_err, m.max_abs_lambda, m.max_abs_beta);
}

}  // namespace

int main(int argc, char** argv) {
    using namespace twintrack;

    CLI::App app{"twintrack: four-wheel-drive traction control simulator"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run one scenario config");
    std::string run_config, run_out = ".";
    bool run_trace = false, run_plot = false, run_assert_slip = false;
    std::string run_controller;
    double run_gamma = -1.0;
    run->add_option("config", run_config, "scenario config (JSON)")->required();
    run->add_option("-o,--out", run_out, "output directory");
    run->add_flag("--trace", run_trace, "write CSV trace");
    run->add_flag("--plot", run_plot, "write SVG plot");
    run->add_flag("--assert-slip", run_assert_slip,
                  "fail (exit 4) if max |lambda| exceeds lambda_max + 0.02");
    run->add_option("--controller", run_controller, "override: proposed|baseline");
    run->add_option("--gamma", run_gamma, "override gamma (>= 0)");

    // compare
    auto* compare = app.add_subcommand("compare", "Run several configs and compare metrics");
    std::vector<std::string> cmp_configs;
    compare->add_option("configs", cmp_configs, "two or more scenario configs")
        ->expected(2, -1);

    // linearize
    auto* lin = app.add_subcommand("linearize", "Eigenvalue table at a slip operating point");
    double lin_slip = 0.05, lin_vx = 15.0, lin_eps = 1.0;
    std::string lin_out;
    lin->add_option("--slip", lin_slip, "slip-ratio operating point");
    lin->add_option("--vx", lin_vx, "vehicle speed (m/s)");
    lin->add_option("--eps", lin_eps, "tire-interface scaling");
    lin->add_option("-o,--out", lin_out, "CSV output file (default stdout)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Run one config over several gamma values");
    std::string sweep_config;
    std::vector<double> sweep_gammas{0.0, 2.0, 5.0, 10.0};
    sweep->add_option("config", sweep_config, "scenario config (JSON)")->required();
    sweep->add_option("--gammas", sweep_gammas, "gamma values");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            ScenarioConfig cfg = config::load_config(run_config);
            if (!run_controller.empty()) {
                if (run_controller == "proposed")
                    cfg.controller = ControllerKind::Proposed;
                else if (run_controller == "baseline")
                    cfg.controller = ControllerKind::Baseline;
                else
                    throw ConfigError("--controller: expected proposed|baseline");
            }
            if (run_gamma >= 0.0) cfg.gamma = run_gamma;

            const Trace trace = harness::run_scenario(cfg);
            const Metrics m = compute_metrics(trace, cfg.ts);
            print_metrics(cfg.name, m);

            std::filesystem::create_directories(run_out);
            if (run_trace)
                write_trace(trace, run_out + "/" + cfg.name + ".csv");
            if (run_plot)
                plot::emit_plots(trace, run_out + "/" + cfg.name + ".svg");
            if (run_assert_slip && m.max_abs_lambda > cfg.gains.lambda_max + 0.02) {
                std::fprintf(stderr, "slip check failed: max|lambda|=%.4f > %.4f\n",
                             m.max_abs_lambda, cfg.gains.lambda_max + 0.02);
                return kExitCheckFailed;
            }
            return kExitOk;
        }

        if (*compare) {
            std::vector<Trace> traces;
            std::vector<std::string> names;
            double ts = 0.01;
            for (const auto& path : cmp_configs) {
                ScenarioConfig cfg = config::load_config(path);
                ts = cfg.ts;
                traces.push_back(harness::run_scenario(cfg));
                names.push_back(cfg.name);
            }
            const auto report = harness::compare_runs(traces, ts);
            std::printf("%-22s", "metric");
            for (const auto& n : names) std::printf(" %16s", n.c_str());
            std::printf("  winner\n");
            for (const auto& row : report) {
                std::printf("%-22s", row.metric.c_str());
                for (double v : row.values) std::printf(" %16.6g", v);
                std::printf("  %s\n", names[row.winner].c_str());
            }
            return kExitOk;
        }

        if (*lin) {
            const PlantParams params = reference_params();
            TireInterfaceState iface;
            iface.eps.fill(lin_eps);
            const OperatingPoint op = analysis::trim_at_slip(lin_slip, lin_vx, params, iface);
            const LinearModel lm = analysis::linearize(op, params);
            const ControllerGains gains = default_gains(params.tire);

            std::ostream* out = &std::cout;
            std::ofstream file;
            if (!lin_out.empty()) {
                file.open(lin_out);
                if (!file) throw ConfigError("linearize: cannot open " + lin_out);
                out = &file;
            }
            *out << "quantity,wheel,real,imag\n";
            Eigen::EigenSolver<Eigen::MatrixXd> es(lm.a);
            for (int k = 0; k < lm.a.rows(); ++k)
                *out << "open_loop_eig,," << es.eigenvalues()(k).real() << ","
                     << es.eigenvalues()(k).imag() << "\n";
            for (int i = 0; i < kNumWheels; ++i)
                *out << "wheel_mode_eig," << i + 1 << ","
                     << analysis::wheel_mode_eigenvalue(lm, i) << ",0\n";
            const auto cl = analysis::closed_loop_spectrum(lm, params, gains, 0);
            for (int k = 0; k < cl.size(); ++k)
                *out << "closed_loop_discrete_eig,1," << cl(k).real() << "," << cl(k).imag()
                     << "\n";
            return kExitOk;
        }

        if (*sweep) {
            const ScenarioConfig base = config::load_config(sweep_config);
            std::vector<std::future<Metrics>> jobs;
            for (double g : sweep_gammas) {
                jobs.push_back(std::async(std::launch::async, [base, g]() {
                    ScenarioConfig cfg = base;
                    cfg.gamma = g;
                    return compute_metrics(harness::run_scenario(cfg), cfg.ts);
                }));
            }
            for (size_t k = 0; k < jobs.size(); ++k) {
                const Metrics m = jobs[k].get();
                print_metrics(base.name + " gamma=" + std::to_string(sweep_gammas[k]), m);
            }
            return kExitOk;
        }
    } catch (const SimulationDiverged& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDiverged;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kExitOk;
}
