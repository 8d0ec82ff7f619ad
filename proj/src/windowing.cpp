#include "chebwin/windowing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace chebwin {

void WindowConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("window config: " + what); };
    if (!(tau > 0.0 && tau < 4.0)) fail("tau must lie in (0, 4)");
    if (!(delta_t > 0.0 && delta_t < tau)) fail("delta_t must lie in (0, tau)");
    if (M_min < 2) fail("M_min must be >= 2");
    if (M_init < M_min) fail("M_init must be >= M_min");
    if (M_max < M_init) fail("M_max must be >= M_init");
}

Interval window_interval(int w, double tau, double t0) {
    if (w < 1) throw std::invalid_argument("window index must be >= 1");
    return Interval(t0 + (w - 1) * tau, t0 + w * tau);
}

SensorSample sensor_sample(const StateOracle& oracle, double t, double delta_t) {
    if (!(delta_t > 0.0)) throw std::invalid_argument("delta_t must be positive");
    SensorSample s;
    s.state = oracle(t);
    s.lagged_state = oracle(t - delta_t);
    if (s.state.size() != s.lagged_state.size()) throw std::runtime_error("sensor: inconsistent state dimension");
    s.derivative = (s.state - s.lagged_state) / delta_t;
    return s;
}

Sensor::Sensor(StateOracle oracle, double delta_t) : oracle_(std::move(oracle)), delta_t_(delta_t) {
    if (!(delta_t > 0.0)) throw std::invalid_argument("delta_t must be positive");
}

SensorSample Sensor::sample_node(double t) {
    SensorSample s = sensor_sample(oracle_, t, delta_t_);
    ++node_reads_;
    ++lagged_reads_;
    return s;
}

Eigen::VectorXd Sensor::read_start(double t) {
    Eigen::VectorXd x = oracle_(t);
    ++start_reads_;
    return x;
}

std::vector<double> time_nodes(const Interval& iv, int M_w) {
    if (M_w < 0) throw std::invalid_argument("node count must be nonnegative");
    const int n = M_w + 1;
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        t[static_cast<std::size_t>(k - 1)] = iv.mid() + 0.5 * iv.width() * std::cos((k - 0.5) * std::numbers::pi / n);
    }
    std::sort(t.begin(), t.end());
    return t;
}

WindowRecord build_window_record(int w, const WindowConfig& schedule, int M_w, Sensor& sensor, double t0) {
    WindowRecord rec;
    rec.index = w;
    rec.interval = window_interval(w, schedule.tau, t0);
    rec.M = M_w;
    rec.node_times = time_nodes(rec.interval, M_w);

    rec.window_start_state = sensor.read_start(rec.interval.a);
    const auto np = rec.window_start_state.size();
    const auto rows = static_cast<Eigen::Index>(rec.node_times.size());
    rec.sampled_states.resize(rows, np);
    rec.sampled_states_lagged.resize(rows, np);
    rec.derivative_estimates.resize(rows, np);
    for (Eigen::Index k = 0; k < rows; ++k) {
        SensorSample s = sensor.sample_node(rec.node_times[static_cast<std::size_t>(k)]);
        if (s.state.size() != np) throw std::runtime_error("sensor: inconsistent state dimension");
        rec.sampled_states.row(k) = s.state.transpose();
        rec.sampled_states_lagged.row(k) = s.lagged_state.transpose();
        rec.derivative_estimates.row(k) = s.derivative.transpose();
    }
    return rec;
}

}  // namespace chebwin
