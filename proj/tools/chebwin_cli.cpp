// chebwin: online sliding-window Chebyshev identification and state estimation.
//
//   chebwin run --config cfg.json [--out-dir d] [--horizon s] [--eps-th v] [--quiet] [--emit-plot-data]
//   chebwin validate --config cfg.json
//   chebwin sweep --config cfg.json --param eps_th --values 1e-3,5e-4 [--out-dir d]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include "chebwin/harness.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::vector<double> parse_values(const std::string& list) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != item.size()) throw chebwin::ConfigError("cannot parse sweep value '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw chebwin::ConfigError("--values is empty");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online Chebyshev pseudospectral identification with adaptive node selection"};
    app.require_subcommand(1);
    app.set_version_flag("--version", chebwin::kToolVersion);

    std::string config_path;
    std::string out_dir;
    double horizon = 0.0;
    double eps_th = 0.0;
    bool quiet = false;
    bool plot_data = false;

    auto* run = app.add_subcommand("run", "run one experiment and write CSV/JSON results");
    run->add_option("--config", config_path, "config JSON (or a previous manifest.json)")->required();
    run->add_option("--out-dir", out_dir, "output directory (overrides config)");
    run->add_option("--horizon", horizon, "simulation horizon [s] (overrides config)");
    run->add_option("--eps-th", eps_th, "desired approximation error (overrides config)");
    run->add_flag("--quiet", quiet, "suppress the summary");
    run->add_flag("--emit-plot-data", plot_data, "also write plot_*.csv files");

    auto* validate = app.add_subcommand("validate", "check a config without running it");
    validate->add_option("--config", config_path, "config JSON")->required();

    std::string param;
    std::string values;
    auto* sweep = app.add_subcommand("sweep", "run a batch of experiments over one parameter");
    sweep->add_option("--config", config_path, "base config JSON")->required();
    sweep->add_option("--param", param, "parameter name (eps_th, kappa, tau, plant.a, ...)")->required();
    sweep->add_option("--values", values, "comma-separated values")->required();
    sweep->add_option("--out-dir", out_dir, "output directory (overrides config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    chebwin::RunConfig cfg;
    try {
        cfg = chebwin::load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (run->parsed()) {
            if (run->count("--horizon")) cfg.horizon = horizon;
            if (run->count("--eps-th")) cfg.eps_th = eps_th;
        }
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    if (validate->parsed()) {
        std::cout << "ok: " << cfg.window_count() << " windows of " << cfg.window.tau << " s\n";
        return 0;
    }

    try {
        if (run->parsed()) {
            const auto report = chebwin::run_experiment(cfg);
            const auto files = chebwin::export_csv(report, cfg.out_dir, plot_data);
            if (!quiet) {
                std::cout << chebwin::summarize(report);
                for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
            }
            return 0;
        }

        std::vector<double> vals;
        try {
            vals = parse_values(values);
            chebwin::RunConfig probe = cfg;
            for (double v : vals) chebwin::set_parameter(probe, param, v);
        } catch (const std::exception& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return kExitConfig;
        }
        const auto results = chebwin::sweep(cfg, param, vals);
        const std::filesystem::path root = cfg.out_dir;
        std::filesystem::create_directories(root);
        std::ofstream summary(root / "sweep.csv", std::ios::binary);
        summary << std::setprecision(17);
        summary << param << ",status,windows,node_samples,final_node_count,dynamics_convergence_time,"
                << "state_convergence_time,error\r\n";
        bool all_ok = true;
        for (std::size_t i = 0; i < results.size(); ++i) {
            const auto& r = results[i];
            summary << r.value << ',' << (r.ok ? "ok" : "failed");
            if (r.ok) {
                const auto dir = root / ("run_" + std::to_string(i));
                chebwin::export_csv(r.report, dir);
                summary << ',' << r.report.windows.size() << ',' << r.report.total_node_samples << ','
                        << r.report.windows.back().M_next << ',' << r.report.dynamics_convergence_time << ','
                        << r.report.state_convergence_time << ",";
                std::cout << param << " = " << r.value << ": " << r.report.total_node_samples << " node samples\n";
            } else {
                all_ok = false;
                std::string msg = r.error;
                for (auto& ch : msg)
                    if (ch == '"') ch = '\'';
                summary << ",,,,,,\"" << msg << '"';
                std::cerr << param << " = " << r.value << ": " << r.error << '\n';
            }
            summary << "\r\n";
        }
        return all_ok ? 0 : kExitNumerical;
    } catch (const chebwin::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}
