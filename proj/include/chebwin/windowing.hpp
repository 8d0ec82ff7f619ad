#pragma once

#include "chebwin/cheb_basis.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <vector>

namespace chebwin {

/// Sliding-window schedule and node-count limits.
struct WindowConfig {
    double tau = 0.2;       ///< window width [s]
    double delta_t = 1e-3;  ///< backward-difference step [s]
    int M_init = 2;
    int M_min = 2;
    int M_max = 16;

    /// Throws std::invalid_argument on any violated invariant
    /// (0 < tau < 4, 0 < delta_t < tau, 2 <= M_min <= M_init <= M_max).
    void validate() const;
};

/// Interval (t^{w-1}, t^w] of window w >= 1, windows starting at t0.
[[nodiscard]] Interval window_interval(int w, double tau, double t0 = 0.0);

/// Continuous-state oracle: returns x(t), throws std::out_of_range when t is
/// not covered.
using StateOracle = std::function<Eigen::VectorXd(double)>;

struct SensorSample {
    Eigen::VectorXd state;
    Eigen::VectorXd lagged_state;
    Eigen::VectorXd derivative;
};

/// Reads x(t) and x(t - delta_t); derivative is the backward difference.
[[nodiscard]] SensorSample sensor_sample(const StateOracle& oracle, double t, double delta_t);

/// Smart sensor: wraps an oracle and counts every read it performs.
class Sensor {
  public:
    Sensor(StateOracle oracle, double delta_t);

    SensorSample sample_node(double t);
    Eigen::VectorXd read_start(double t);

    [[nodiscard]] double delta_t() const { return delta_t_; }
    [[nodiscard]] std::size_t node_reads() const { return node_reads_; }
    [[nodiscard]] std::size_t lagged_reads() const { return lagged_reads_; }
    [[nodiscard]] std::size_t start_reads() const { return start_reads_; }

  private:
    StateOracle oracle_;
    double delta_t_;
    std::size_t node_reads_ = 0;
    std::size_t lagged_reads_ = 0;
    std::size_t start_reads_ = 0;
};

/// Everything the sensor delivers for one window. Rows are aligned with
/// node_times, which are stored ascending.
struct WindowRecord {
    int index = 0;
    Interval interval;
    int M = 0;
    std::vector<double> node_times;
    Eigen::MatrixXd sampled_states;         ///< (M+1) x N_P
    Eigen::MatrixXd sampled_states_lagged;  ///< (M+1) x N_P, at t_k - delta_t
    Eigen::MatrixXd derivative_estimates;   ///< (M+1) x N_P
    Eigen::VectorXd window_start_state;     ///< x(t^{w-1})

    [[nodiscard]] int dimension() const { return static_cast<int>(sampled_states.cols()); }
};

/// M_w + 1 Chebyshev time nodes strictly inside iv, ascending.
[[nodiscard]] std::vector<double> time_nodes(const Interval& iv, int M_w);

/// Samples window w with M_w + 1 nodes (plus lagged partners) and the
/// window-start state.
[[nodiscard]] WindowRecord build_window_record(int w, const WindowConfig& schedule, int M_w, Sensor& sensor,
                                               double t0 = 0.0);

}  // namespace chebwin
