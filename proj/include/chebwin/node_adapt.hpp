#pragma once

#include "chebwin/identifier.hpp"
#include "chebwin/windowing.hpp"

#include <string_view>

namespace chebwin {

/// Parameters of the node-count update law with a dead zone
/// [kappa * eps_th, eps_th].
struct NodeSelectorState {
    double eps_th = 1e-3;
    double kappa = 0.1;
    double gamma1 = 0.2;
    double gamma2 = 0.9;
    int M_current = 2;
    int M_min = 2;
    int M_max = 16;

    void validate() const;
};

enum class ErrorRegime { Above, InBand, Below };

[[nodiscard]] std::string_view to_string(ErrorRegime r);
[[nodiscard]] ErrorRegime classify(double error, double eps_th, double kappa);

struct ErrorReport {
    int window_index = 0;
    double avg_error = 0.0;
    double max_node_error = 0.0;
    ErrorRegime regime = ErrorRegime::InBand;
};

/// Mean over the window's nodes of ||Xdot_k - theta^T T^S(t_k)||.
[[nodiscard]] ErrorReport average_error(const WindowRecord& record, const CoefficientSet& theta, const Interval& iv,
                                        double eps_th, double kappa);

/// Practical law: floor of gamma1 ln(E/eps_th) above the band, ceiling of
/// gamma2 ln(E/(kappa eps_th)) below it, clamped to [M_min, M_max].
/// E == 0 takes the largest decrement (clamps to M_min).
[[nodiscard]] int update_node_count(const NodeSelectorState& state, const ErrorReport& report);

/// Reference law from the exponential decay bound: ceiling above the band with
/// rho1 = 1 / ln((M+1)/e), floor below with rho2 = 1 / ln((M_under+1)/e).
/// Not clamped. Requires M_w >= 2 and M_under >= 2.
[[nodiscard]] int theoretical_node_count(int M_w, double E_max, double eps_th, double kappa, int M_under);

/// C ((M+1)/e)^(-M).
[[nodiscard]] double decay_bound(double C_w, int M_w);

}  // namespace chebwin
