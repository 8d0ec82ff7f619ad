#include "chebwin/estimator.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace chebwin;
using doctest::Approx;

namespace {

Eigen::MatrixXd random_spd(std::mt19937& rng, int n, double shift) {
    std::normal_distribution<double> N(0.0, 1.0);
    const Eigen::MatrixXd A = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return N(rng); });
    return A * A.transpose() + shift * Eigen::MatrixXd::Identity(n, n);
}

EstimatorState make_state(const Eigen::MatrixXd& theta, const Interval& iv, const GainDesign& gain,
                          const Eigen::VectorXd& x_hat, const Eigen::VectorXd& anchor) {
    EstimatorState s;
    s.x_hat = x_hat;
    s.t = iv.a;
    s.active_theta = CoefficientSet{1, CoefficientKind::Theta, theta};
    s.active_interval = iv;
    s.gain = gain;
    s.anchor_state = anchor;
    return s;
}

GainDesign zero_gain(int n) {
    GainDesign g;
    g.Z = Eigen::MatrixXd::Identity(n, n);
    g.Q = Eigen::MatrixXd::Zero(n, n);
    g.K = Eigen::MatrixXd::Zero(n, n);
    return g;
}

}  // namespace

TEST_CASE("solve_gain examples") {
    const Eigen::MatrixXd Z = 10.0 * Eigen::MatrixXd::Identity(2, 2);
    const Eigen::MatrixXd Q = Eigen::Vector2d(5.0, 4.5).asDiagonal();
    const auto g = solve_gain(Z, Q);
    CHECK(g.K(0, 0) == Approx(-0.25).epsilon(1e-15));
    CHECK(g.K(1, 1) == Approx(-0.225).epsilon(1e-15));
    CHECK(g.K(0, 1) == 0.0);
    CHECK(g.K(1, 0) == 0.0);
    CHECK(g.residual() <= 1e-12);
    CHECK(g.meets_stability_condition);

    const auto g2 = solve_gain(Eigen::MatrixXd::Identity(3, 3), 2.0 * Eigen::MatrixXd::Identity(3, 3));
    CHECK((g2.K + Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);
    CHECK_FALSE(g2.meets_stability_condition);
}

TEST_CASE("solve_gain residual on random SPD pairs (property)") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 4;
        const Eigen::MatrixXd Z = random_spd(rng, n, 0.5);
        const Eigen::MatrixXd Q = random_spd(rng, n, 0.5);
        const auto g = solve_gain(Z, Q);
        CHECK(g.residual() <= 1e-12 * std::max(1.0, Q.norm()));
        // Sym(Z K) = -Q is negative definite.
        const Eigen::MatrixXd S = 0.5 * (Z * g.K + g.K.transpose() * Z);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
        CHECK(eig.eigenvalues().maxCoeff() < 0.0);
    }
}

TEST_CASE("solve_gain rejects invalid inputs") {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd nonsym = I;
    nonsym(0, 1) = 0.5;
    CHECK_THROWS_AS((void)solve_gain(nonsym, I), std::invalid_argument);
    CHECK_THROWS_AS((void)solve_gain(I, -I), std::invalid_argument);
    CHECK_THROWS_AS((void)solve_gain(Eigen::MatrixXd::Zero(2, 2), I), std::invalid_argument);
    CHECK_THROWS_AS((void)solve_gain(I, Eigen::MatrixXd::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("estimator_rhs examples") {
    const Interval iv(0.2, 0.4);
    const auto g = solve_gain(10.0 * Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(5.0, 4.5).asDiagonal());
    const Eigen::Vector2d m(0.3, -0.1);

    const auto zero = make_state(Eigen::MatrixXd::Zero(3, 2), iv, g, m, m);
    CHECK(estimator_rhs(zero, 0.3).norm() == 0.0);

    Eigen::MatrixXd theta(3, 2);
    theta << 0.1, -0.7, 0.4, 0.2, -0.05, 0.3;
    const auto ff = make_state(theta, iv, zero_gain(2), Eigen::Vector2d(1.0, 1.0), m);
    // Standalone evaluation at t = 0.35 (x = 0.5): T = [1, 0.5, -0.5].
    const Eigen::Vector3d T(1.0, 0.5, -0.5);
    CHECK((estimator_rhs(ff, 0.35) - theta.transpose() * T).norm() <= 1e-15);

    // Full right-hand side with feedback at the window midpoint.
    const Eigen::Vector2d xh(0.5, 0.2);
    const auto full = make_state(theta, iv, g, xh, m);
    const Eigen::Vector3d Tm(1.0, 0.0, -1.0);
    const Eigen::Vector2d want = theta.transpose() * Tm - g.K * (m - xh);
    CHECK((estimator_rhs(full, 0.3) - want).norm() <= 1e-15);

    CHECK_THROWS_AS((void)estimator_rhs(full, 0.5), DomainError);
}

TEST_CASE("advance_window resets to the measured state") {
    const auto g = solve_gain(Eigen::MatrixXd::Identity(2, 2), 4.0 * Eigen::MatrixXd::Identity(2, 2));
    auto s = make_state(Eigen::MatrixXd::Ones(3, 2), Interval(0.0, 0.2), g, Eigen::Vector2d(2, 2), Eigen::Vector2d(0, 0));
    const Eigen::Vector2d m(0.51, -0.3);
    const CoefficientSet theta{2, CoefficientKind::Theta, Eigen::MatrixXd::Zero(4, 2)};
    const auto a = advance_window(s, theta, Interval(0.2, 0.4), m);
    CHECK(a.x_hat == m);
    CHECK(a.anchor_state == m);
    CHECK((a.anchor_state - a.x_hat).norm() == 0.0);
    CHECK(a.active_interval == Interval(0.2, 0.4));
    CHECK(a.active_theta.degree() == 3);
    CHECK(a.t == 0.2);
    const auto b = advance_window(a, theta, Interval(0.2, 0.4), m);
    CHECK(b.x_hat == a.x_hat);
    CHECK_THROWS_AS((void)advance_window(s, theta, Interval(0.2, 0.4), Eigen::Vector3d(1, 2, 3)), std::invalid_argument);
}

TEST_CASE("integrate_window simple trajectories") {
    const Interval iv(0.4, 0.6);
    auto s = make_state(Eigen::MatrixXd::Zero(2, 2), iv, zero_gain(2), Eigen::Vector2d(1.5, -2), Eigen::Vector2d(0, 0));
    const auto traj = integrate_window(s, 1e-3);
    REQUIRE(traj.size() == 201);
    CHECK(traj.front().t == 0.4);
    CHECK(traj.back().t == 0.6);
    for (const auto& p : traj) CHECK(p.x_hat == Eigen::Vector2d(1.5, -2));
    CHECK(s.t == 0.6);

    // Constant feedforward c: x_hat(t) = x_hat(t0) + c (t - t0).
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(3, 2);
    theta(0, 0) = 0.7;
    theta(0, 1) = -1.2;
    auto lin = make_state(theta, iv, zero_gain(2), Eigen::Vector2d(1, 1), Eigen::Vector2d(0, 0));
    const auto ltraj = integrate_window(lin, 1e-3);
    for (const auto& p : ltraj) {
        const double dt = p.t - 0.4;
        CHECK(p.x_hat[0] == Approx(1 + 0.7 * dt).epsilon(1e-13));
        CHECK(p.x_hat[1] == Approx(1 - 1.2 * dt).epsilon(1e-13));
    }

    // Step that does not tile the window exactly is adjusted.
    auto adj = make_state(Eigen::MatrixXd::Zero(2, 2), iv, zero_gain(2), Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 0));
    const auto atraj = integrate_window(adj, 0.0301);
    CHECK(atraj.size() == 8);
    CHECK(atraj.back().t == 0.6);
    CHECK_THROWS_AS((void)integrate_window(adj, 0.0), std::invalid_argument);
}

TEST_CASE("reset keeps the state error at zero at window starts") {
    const auto g = solve_gain(10.0 * Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(5.0, 4.5).asDiagonal());
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    EstimatorState s = make_state(Eigen::MatrixXd::Zero(3, 2), window_interval(1, 0.2), g, Eigen::Vector2d(2, 2),
                                  Eigen::Vector2d(0, 0));
    for (int w = 1; w <= 20; ++w) {
        const Eigen::Vector2d measured(U(rng), U(rng));
        const CoefficientSet theta{w, CoefficientKind::Theta, Eigen::MatrixXd::NullaryExpr(3, 2, [&] { return U(rng); })};
        s = advance_window(s, theta, window_interval(w, 0.2), measured);
        CHECK((measured - s.x_hat).norm() == 0.0);
        const auto traj = integrate_window(s, 1e-3);
        CHECK(traj.front().x_hat == measured);
        CHECK(std::isfinite(s.x_hat.norm()));
    }
}

TEST_CASE("integrate_window is fourth order") {
    // dx/dt = p(t) - x with K = -I, anchor 0, on a long interval so the
    // truncation error dominates rounding.
    const Interval iv(0.0, 4.0);
    const auto g = solve_gain(Eigen::MatrixXd::Identity(1, 1), 2.0 * Eigen::MatrixXd::Identity(1, 1));
    Eigen::MatrixXd theta(6, 1);
    theta << 0.3, -1.0, 0.8, 0.5, -0.6, 0.9;
    auto run = [&](double h) {
        auto s = make_state(theta, iv, g, Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Zero(1));
        (void)integrate_window(s, h);
        return s.x_hat[0];
    };
    const double ref = run(0.2 / 64);
    const double e1 = std::abs(run(0.2) - ref);
    const double e2 = std::abs(run(0.1) - ref);
    INFO("e1=" << e1 << " e2=" << e2);
    CHECK(e1 / e2 == Approx(16.0).epsilon(0.25));
}

TEST_CASE("theta_error_bound_term") {
    const CoefficientSet t{1, CoefficientKind::Theta, Eigen::MatrixXd::Constant(4, 2, 0.5)};
    CHECK(theta_error_bound_term(t) == Approx(2 * 2 * std::sqrt(8 * 0.25)).epsilon(1e-15));
    const CoefficientSet z{1, CoefficientKind::Theta, Eigen::MatrixXd::Zero(3, 2)};
    CHECK(theta_error_bound_term(z) == 0.0);
}
