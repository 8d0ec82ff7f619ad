#pragma once

#include "chebwin/cheb_basis.hpp"
#include "chebwin/identifier.hpp"

#include <Eigen/Dense>

#include <vector>

namespace chebwin {

/// Gain K solving Z K + K^T Z = -Q.
struct GainDesign {
    Eigen::MatrixXd Z;
    Eigen::MatrixXd Q;
    Eigen::MatrixXd K;
    /// lambda_min(Q) > 3; the stability result assumes it, nothing enforces it.
    bool meets_stability_condition = false;

    [[nodiscard]] double residual() const { return (Z * K + K.transpose() * Z + Q).norm(); }
};

/// K = -Z^{-1} Q / 2, which satisfies the Lyapunov equation for any symmetric
/// Z since (Z^{-1} Q)^T Z = Q. Throws std::invalid_argument for non-SPD
/// inputs.
[[nodiscard]] GainDesign solve_gain(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& Q);

struct EstimatorState {
    Eigen::VectorXd x_hat;
    double t = 0.0;
    CoefficientSet active_theta;
    Interval active_interval;
    GainDesign gain;
    Eigen::VectorXd anchor_state;  ///< measured x(t^{w-1})
};

struct EstimatorSample {
    double t;
    Eigen::VectorXd x_hat;
};

/// theta^T T^S(t) - K (anchor - x_hat).
[[nodiscard]] Eigen::VectorXd estimator_rhs(const EstimatorState& state, double t);

/// Same right-hand side evaluated at an arbitrary x_hat (used by the integrator).
[[nodiscard]] Eigen::VectorXd estimator_rhs(const EstimatorState& state, double t, const Eigen::VectorXd& x_hat);

/// Resets x_hat and the anchor to the measured start state and installs the
/// new window's coefficients.
[[nodiscard]] EstimatorState advance_window(const EstimatorState& state, const CoefficientSet& theta_new,
                                            const Interval& iv_new, const Eigen::VectorXd& measured_start);

/// Fixed-step RK4 across the active window. The step is adjusted to
/// width / round(width / step) so the last sample lands on the window end.
/// Returns every step including the start; `state` ends at the window end.
std::vector<EstimatorSample> integrate_window(EstimatorState& state, double step);

/// 2 sqrt(M+1) ||theta||_F, the only data-computable term of the theta-error
/// bound.
[[nodiscard]] double theta_error_bound_term(const CoefficientSet& theta);

}  // namespace chebwin
