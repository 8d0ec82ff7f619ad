#pragma once

#include "chebwin/cheb_basis.hpp"
#include "chebwin/windowing.hpp"

#include <Eigen/Dense>

#include <stdexcept>

namespace chebwin {

class SingularSystemError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class CoefficientKind { Eta, Theta };

/// Coefficient matrix of a window polynomial: (M+1) x N_P, one column per
/// state dimension.
struct CoefficientSet {
    int window_index = 0;
    CoefficientKind kind = CoefficientKind::Eta;
    Eigen::MatrixXd matrix;

    [[nodiscard]] int degree() const { return static_cast<int>(matrix.rows()) - 1; }
    [[nodiscard]] int dimension() const { return static_cast<int>(matrix.cols()); }
};

/// Ridge term R0 and prior eta0 of the batch estimator.
struct RegularizerConfig {
    Eigen::MatrixXd R0;    ///< (M+1) x (M+1), symmetric PSD
    Eigen::MatrixXd eta0;  ///< (M+1) x N_P

    /// R0 = ridge * I, eta0 = 0.
    static RegularizerConfig ridge(int M, int dimension, double ridge = 1e-8);
};

/// Square design: column k is the shifted basis evaluated at node k.
[[nodiscard]] Eigen::MatrixXd design_matrix(const WindowRecord& record);

/// eta = (T T^T + R0)^{-1} (R0 eta0 + T Xdot).
[[nodiscard]] CoefficientSet fit_window(const WindowRecord& record, const RegularizerConfig& reg);

/// Row p, column i: d^p T_i^S / dt^p at the left end of iv_new.
[[nodiscard]] Eigen::MatrixXd continuity_matrix(const Interval& iv_new, int M);

/// Coefficients on iv_new whose polynomial matches eta_prev's value and first
/// M derivatives at the window transition. Windows must be adjacent and of
/// equal width.
[[nodiscard]] CoefficientSet solve_theta(const CoefficientSet& eta_prev, const Interval& iv_prev,
                                         const Interval& iv_new);

/// coeffs^T T^S(t).
[[nodiscard]] Eigen::VectorXd predict_dynamics(const CoefficientSet& coeffs, const Interval& iv, double t,
                                               Extrapolation ext = Extrapolation::Forbid);

}  // namespace chebwin
