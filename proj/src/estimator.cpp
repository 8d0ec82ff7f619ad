#include "chebwin/estimator.hpp"

#include "chebwin/rk4.hpp"

#include <cmath>
#include <stdexcept>

namespace chebwin {

namespace {

bool is_spd(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols() || A.rows() == 0) return false;
    if (!A.isApprox(A.transpose(), 1e-12)) return false;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    return llt.info() == Eigen::Success;
}

}  // namespace

GainDesign solve_gain(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& Q) {
    if (!is_spd(Z)) throw std::invalid_argument("solve_gain: Z must be symmetric positive definite");
    if (!is_spd(Q)) throw std::invalid_argument("solve_gain: Q must be symmetric positive definite");
    if (Z.rows() != Q.rows()) throw std::invalid_argument("solve_gain: Z and Q dimensions differ");

    GainDesign g;
    g.Z = Z;
    g.Q = Q;
    const Eigen::Index n = Z.rows();
    const double z = Z(0, 0);
    if (Z.isApprox(z * Eigen::MatrixXd::Identity(n, n), 0.0)) {
        g.K = -Q / (2.0 * z);
    } else {
        Eigen::LLT<Eigen::MatrixXd> llt(Z);
        if (llt.rcond() < 1e-14) throw std::invalid_argument("solve_gain: Z is singular to working precision");
        g.K = -0.5 * llt.solve(Q);
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q, Eigen::EigenvaluesOnly);
    g.meets_stability_condition = eig.eigenvalues().minCoeff() > 3.0;
    return g;
}

Eigen::VectorXd estimator_rhs(const EstimatorState& state, double t, const Eigen::VectorXd& x_hat) {
    return predict_dynamics(state.active_theta, state.active_interval, t) - state.gain.K * (state.anchor_state - x_hat);
}

Eigen::VectorXd estimator_rhs(const EstimatorState& state, double t) { return estimator_rhs(state, t, state.x_hat); }

EstimatorState advance_window(const EstimatorState& state, const CoefficientSet& theta_new, const Interval& iv_new,
                              const Eigen::VectorXd& measured_start) {
    if (measured_start.size() != state.x_hat.size() || theta_new.dimension() != measured_start.size()) {
        throw std::invalid_argument("advance_window: dimension mismatch");
    }
    EstimatorState next = state;
    next.x_hat = measured_start;
    next.anchor_state = measured_start;
    next.active_theta = theta_new;
    next.active_interval = iv_new;
    next.t = iv_new.a;
    return next;
}

std::vector<EstimatorSample> integrate_window(EstimatorState& state, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("integrate_window: step must be positive");
    const Interval iv = state.active_interval;
    const auto n = static_cast<long>(std::lround(iv.width() / step));
    if (n < 1 || std::abs(n * step - iv.width()) > step) {
        throw std::invalid_argument("integrate_window: step does not divide the window width");
    }
    const double h = iv.width() / static_cast<double>(n);

    std::vector<EstimatorSample> out;
    out.reserve(static_cast<std::size_t>(n + 1));
    Eigen::VectorXd x = state.x_hat;
    out.push_back({iv.a, x});
    auto f = [&state](double t, const Eigen::VectorXd& xh) { return estimator_rhs(state, t, xh); };
    for (long i = 0; i < n; ++i) {
        const double t = iv.a + static_cast<double>(i) * h;
        x = rk4_step(f, t, x, h);
        const double t_next = (i + 1 == n) ? iv.b : iv.a + static_cast<double>(i + 1) * h;
        out.push_back({t_next, x});
    }
    state.x_hat = x;
    state.t = iv.b;
    return out;
}

double theta_error_bound_term(const CoefficientSet& theta) {
    return 2.0 * std::sqrt(theta.degree() + 1.0) * theta.matrix.norm();
}

}  // namespace chebwin
