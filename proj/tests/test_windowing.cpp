#include "chebwin/plant_sim.hpp"
#include "chebwin/windowing.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>

using namespace chebwin;
using doctest::Approx;

namespace {

StateOracle scalar(std::function<double(double)> f, double t_min = 0.0) {
    return [f = std::move(f), t_min](double t) -> Eigen::VectorXd {
        if (t < t_min) throw std::out_of_range("before trace start");
        return Eigen::VectorXd::Constant(1, f(t));
    };
}

}  // namespace

TEST_CASE("WindowConfig validation") {
    WindowConfig c;
    CHECK_NOTHROW(c.validate());
    auto bad = [](auto mutate) {
        WindowConfig c;
        mutate(c);
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    };
    bad([](WindowConfig& c) { c.tau = 4.0; });
    bad([](WindowConfig& c) { c.tau = 0.0; });
    bad([](WindowConfig& c) { c.delta_t = c.tau; });
    bad([](WindowConfig& c) { c.delta_t = 0.0; });
    bad([](WindowConfig& c) { c.M_min = 1; c.M_init = 1; });
    bad([](WindowConfig& c) { c.M_init = 1; });
    bad([](WindowConfig& c) { c.M_max = 1; });
}

TEST_CASE("time_nodes examples") {
    const Interval iv(0.0, 0.2);
    const auto t = time_nodes(iv, 2);
    REQUIRE(t.size() == 3);
    CHECK(t[0] == Approx(0.1 + 0.1 * std::cos(5 * std::numbers::pi / 6)).epsilon(1e-15));
    CHECK(t[0] == Approx(0.01340).epsilon(1e-4));
    CHECK(t[1] == Approx(0.1).epsilon(1e-15));
    CHECK(t[2] == Approx(0.18660).epsilon(1e-4));

    const auto single = time_nodes(iv, 0);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == Approx(0.1).epsilon(1e-15));

    const auto t3 = time_nodes(Interval(1.0, 1.2), 3);
    const double want[] = {1.0076120467488714, 1.0617316567634911, 1.138268343236509, 1.1923879532511288};
    for (int k = 0; k < 4; ++k) CHECK(t3[k] == Approx(want[k]).epsilon(1e-14));
}

TEST_CASE("time nodes are strictly interior and ascending (property)") {
    for (int w = 1; w <= 200; ++w) {
        const Interval iv = window_interval(w, 0.2);
        for (int M = 0; M <= 16; ++M) {
            const auto t = time_nodes(iv, M);
            REQUIRE(t.size() == static_cast<std::size_t>(M + 1));
            for (std::size_t k = 0; k < t.size(); ++k) {
                CHECK(t[k] > iv.a);
                CHECK(t[k] < iv.b);
                if (k > 0) CHECK(t[k] > t[k - 1]);
            }
        }
    }
}

TEST_CASE("window_interval") {
    const Interval iv = window_interval(3, 0.2);
    CHECK(iv.a == Approx(0.4));
    CHECK(iv.b == Approx(0.6));
    CHECK_THROWS((void)window_interval(0, 0.2));
}

TEST_CASE("sensor_sample backward difference") {
    const auto s = sensor_sample(scalar([](double t) { return t * t; }), 1.0, 0.001);
    CHECK(s.derivative[0] == Approx(1.999).epsilon(1e-12));
    CHECK(s.state[0] == 1.0);
    CHECK(s.lagged_state[0] == Approx(0.998001).epsilon(1e-15));

    const auto c = sensor_sample(scalar([](double) { return 3.0; }), 0.5, 0.01);
    CHECK(c.derivative[0] == 0.0);

    CHECK_THROWS_AS((void)sensor_sample(scalar([](double t) { return t; }), 0.0005, 0.001), std::out_of_range);
}

TEST_CASE("backward difference error is O(delta_t) with the exact constant on quadratics") {
    // x = c t^2: (x(t) - x(t - h)) / h = 2ct - ch, so the error is exactly c h.
    for (double c : {0.5, 2.0, -3.0}) {
        for (double h : {1e-2, 1e-3, 1e-4}) {
            const auto s = sensor_sample(scalar([c](double t) { return c * t * t; }), 1.3, h);
            CHECK(std::abs(s.derivative[0] - 2 * c * 1.3) == Approx(std::abs(c) * h).epsilon(1e-6));
        }
    }
}

TEST_CASE("sensor derivative on a Stuart-Landau trace") {
    const PlantSpec sl = stuart_landau();
    const Trace trace = simulate(sl, Eigen::Vector2d(0.5, 0.5), 1.0, 1e-3);
    const StateOracle oracle = [&trace](double t) { return trace.query(t); };
    const double dt = 1e-3;
    const auto s = sensor_sample(oracle, 0.1, dt);
    const Eigen::VectorXd truth = plant_rhs(sl, trace.query(0.1));
    // |x''| <= r omega^2 + radial terms ~ 1.6 on the limit cycle; O(dt) with C = 1.
    CHECK((s.derivative - truth).norm() <= 1.0 * dt);
    CHECK((s.derivative - truth).norm() > 0.0);
}

TEST_CASE("build_window_record counts and layout") {
    Sensor sensor(scalar([](double t) { return std::sin(t); }), 1e-3);
    WindowConfig cfg;
    const auto rec = build_window_record(1, cfg, 2, sensor);
    CHECK(rec.index == 1);
    CHECK(rec.M == 2);
    CHECK(rec.interval == Interval(0.0, 0.2));
    REQUIRE(rec.node_times.size() == 3);
    CHECK(rec.node_times == time_nodes(Interval(0.0, 0.2), 2));
    CHECK(rec.sampled_states.rows() == 3);
    CHECK(rec.window_start_state[0] == 0.0);
    CHECK(sensor.node_reads() == 3);
    CHECK(sensor.lagged_reads() == 3);
    CHECK(sensor.start_reads() == 1);
    for (int k = 0; k < 3; ++k) {
        const double want = (rec.sampled_states(k, 0) - rec.sampled_states_lagged(k, 0)) / 1e-3;
        CHECK(rec.derivative_estimates(k, 0) == Approx(want).epsilon(1e-14));
        CHECK(rec.sampled_states(k, 0) == Approx(std::sin(rec.node_times[k])).epsilon(1e-15));
    }

    Sensor s0(scalar([](double t) { return t; }), 1e-3);
    const auto degenerate = build_window_record(2, cfg, 0, s0);
    CHECK(degenerate.node_times.size() == 1);
    CHECK(s0.node_reads() + s0.start_reads() == 2);
}

TEST_CASE("sample budget over a horizon with constant M") {
    WindowConfig cfg;
    Sensor sensor(scalar([](double t) { return t; }), 1e-3);
    const double H = 12.0;
    const int windows = static_cast<int>(std::ceil(H / cfg.tau - 1e-9));
    for (int w = 1; w <= windows; ++w) (void)build_window_record(w, cfg, 3, sensor);
    CHECK(windows == 60);
    CHECK(sensor.node_reads() == static_cast<std::size_t>(windows * 4));
    CHECK(sensor.start_reads() == static_cast<std::size_t>(windows));
}

TEST_CASE("sensor errors propagate out of build_window_record") {
    WindowConfig cfg;
    // Nodes of window 1 with many nodes sit closer than delta_t to t = 0.
    Sensor sensor(scalar([](double t) { return t; }, 0.0), 1e-3);
    CHECK_THROWS_AS((void)build_window_record(1, cfg, 16, sensor), std::out_of_range);
}
