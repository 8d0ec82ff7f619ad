#pragma once

#include "chebwin/estimator.hpp"
#include "chebwin/identifier.hpp"
#include "chebwin/node_adapt.hpp"
#include "chebwin/plant_sim.hpp"
#include "chebwin/windowing.hpp"

#include "json.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace chebwin {

inline constexpr const char* kToolVersion = "0.1.0";

/// Invalid or inconsistent run configuration.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Failure inside the window loop; carries the window index.
class PipelineError : public std::runtime_error {
  public:
    PipelineError(int window, const std::string& what);
    [[nodiscard]] int window() const { return window_; }

  private:
    int window_;
};

enum class PriorMode { Zero, WarmStart };

struct RunConfig {
    std::string plant = "stuart_landau";
    std::map<std::string, double> plant_params{{"a", 0.5}, {"omega", 1.5}};
    std::uint64_t seed = 0;

    WindowConfig window;
    double eps_th = 1e-3;
    double kappa = 0.1;
    double gamma1 = 0.2;
    double gamma2 = 0.9;

    Eigen::MatrixXd Z = 10.0 * Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd Q = (Eigen::MatrixXd(2, 2) << 5.0, 0.0, 0.0, 4.5).finished();

    double ridge = 1e-8;
    PriorMode prior = PriorMode::Zero;

    double horizon = 12.0;
    double sim_step = 1e-3;
    Eigen::VectorXd x0 = Eigen::Vector2d(0.5, 0.5);
    Eigen::VectorXd xhat0 = Eigen::Vector2d(2.0, 2.0);
    Eigen::MatrixXd eta1;  ///< (M_init+1) x N_P coefficients used as theta on window 1
    /// Apply the measured-state reset at t = 0 as well as at later window starts.
    bool reset_first_window = true;
    double noise_std = 0.0;

    /// Thresholds used when reporting convergence times.
    double dynamics_tol = 1e-2;
    double state_tol = 5e-2;

    std::string out_dir = "out";

    /// Number of windows; the horizon must be a whole number of windows.
    [[nodiscard]] int window_count() const;
    /// Throws ConfigError.
    void validate() const;
};

/// Stuart-Landau defaults (a = 0.5, omega = 1.5, tau = 0.2 s, 12 s horizon).
[[nodiscard]] RunConfig default_stuart_landau_config();

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

/// Reads a config document, or the "config" member of a run manifest.
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

struct WindowSummary {
    int index = 0;
    Interval interval;
    int M = 0;
    int M_next = 0;
    int node_samples = 0;
    double avg_error = 0.0;
    double max_node_error = 0.0;
    ErrorRegime regime = ErrorRegime::InBand;
    CoefficientSet eta;
    CoefficientSet theta;
    Eigen::VectorXd state_error_start;  ///< x - x_hat right after the reset
    Eigen::VectorXd state_error_end;
    double theta_bound_term = 0.0;
    std::vector<double> node_times;
};

struct TrajectoryRow {
    double t = 0.0;
    int window = 0;
    Eigen::VectorXd x;
    Eigen::VectorXd x_hat;
    Eigen::VectorXd F;
    Eigen::VectorXd F_hat_theta;  ///< causal, from the estimator's coefficients
    Eigen::VectorXd F_hat_eta;    ///< retrospective, from the window's own fit
};

struct RunReport {
    RunConfig config;
    std::vector<WindowSummary> windows;
    std::vector<TrajectoryRow> trajectory;
    std::size_t total_node_samples = 0;
    std::size_t window_start_samples = 0;
    std::size_t lagged_samples = 0;
    std::size_t periodic_equivalent_samples = 0;
    /// Time after which the error stays within tolerance (0 if it always does).
    double dynamics_convergence_time = 0.0;
    double state_convergence_time = 0.0;
    double wall_clock_seconds = 0.0;
    bool gain_meets_stability_condition = false;
};

/// Runs the full identification / estimation pipeline. Deterministic in the
/// config. Throws ConfigError before any work, PipelineError inside windows.
[[nodiscard]] RunReport run_experiment(const RunConfig& config);

/// Writes trajectory.csv, windows.csv and manifest.json (plus plot_*.csv when
/// `plot_data` is set). Returns the written paths.
std::vector<std::filesystem::path> export_csv(const RunReport& report, const std::filesystem::path& out_dir,
                                              bool plot_data = false);

[[nodiscard]] nlohmann::json manifest(const RunReport& report);

[[nodiscard]] std::string summarize(const RunReport& report);

/// Sets a named scalar parameter (eps_th, kappa, gamma1, gamma2, tau,
/// delta_t, horizon, sim_step, ridge, M_init, M_max, noise_std, seed, or a
/// plant parameter as "plant.<name>").
void set_parameter(RunConfig& config, const std::string& name, double value);

struct SweepResult {
    double value = 0.0;
    bool ok = false;
    std::string error;
    RunReport report;
};

/// Runs one experiment per value concurrently; results keep the input order.
[[nodiscard]] std::vector<SweepResult> sweep(const RunConfig& base, const std::string& param,
                                             const std::vector<double>& values);

}  // namespace chebwin
