#include "chebwin/node_adapt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chebwin {

void NodeSelectorState::validate() const {
    auto fail = [](const char* what) { throw std::invalid_argument(std::string("node selector: ") + what); };
    if (!(eps_th > 0.0)) fail("eps_th must be positive");
    if (!(kappa > 0.0 && kappa < 1.0)) fail("kappa must lie in (0, 1)");
    if (!(gamma1 > 0.0 && gamma1 < 10.0)) fail("gamma1 must lie in (0, 10)");
    if (!(gamma2 > 0.0 && gamma2 < 10.0)) fail("gamma2 must lie in (0, 10)");
    if (M_min < 2) fail("M_min must be >= 2");
    if (M_max < M_min) fail("M_max must be >= M_min");
}

std::string_view to_string(ErrorRegime r) {
    switch (r) {
    case ErrorRegime::Above: return "above";
    case ErrorRegime::InBand: return "in_band";
    case ErrorRegime::Below: return "below";
    }
    return "unknown";
}

ErrorRegime classify(double error, double eps_th, double kappa) {
    if (error > eps_th) return ErrorRegime::Above;
    if (error < kappa * eps_th) return ErrorRegime::Below;
    return ErrorRegime::InBand;
}

ErrorReport average_error(const WindowRecord& record, const CoefficientSet& theta, const Interval& iv, double eps_th,
                          double kappa) {
    if (theta.dimension() != record.derivative_estimates.cols()) {
        throw std::invalid_argument("average_error: dimension mismatch between theta and record");
    }
    const auto n = record.node_times.size();
    if (n == 0 || static_cast<Eigen::Index>(n) != record.derivative_estimates.rows()) {
        throw std::invalid_argument("average_error: record has no aligned node data");
    }
    ErrorReport rep;
    rep.window_index = record.index;
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const Eigen::VectorXd pred = predict_dynamics(theta, iv, record.node_times[k]);
        const double e = (record.derivative_estimates.row(static_cast<Eigen::Index>(k)).transpose() - pred).norm();
        sum += e;
        rep.max_node_error = std::max(rep.max_node_error, e);
    }
    rep.avg_error = sum / static_cast<double>(n);
    rep.regime = classify(rep.avg_error, eps_th, kappa);
    return rep;
}

int update_node_count(const NodeSelectorState& s, const ErrorReport& report) {
    const double E = report.avg_error;
    if (!(E >= 0.0)) throw std::invalid_argument("update_node_count: error must be nonnegative");
    long next = s.M_current;
    if (E > s.eps_th) {
        next += static_cast<long>(std::floor(s.gamma1 * std::log(E / s.eps_th)));
    } else if (E < s.kappa * s.eps_th) {
        if (E == 0.0) return s.M_min;
        next += static_cast<long>(std::ceil(s.gamma2 * std::log(E / (s.kappa * s.eps_th))));
    }
    return static_cast<int>(std::clamp<long>(next, s.M_min, s.M_max));
}

int theoretical_node_count(int M_w, double E_max, double eps_th, double kappa, int M_under) {
    if (M_w < 2 || M_under < 2) throw DomainError("theoretical_node_count requires M >= 2");
    if (!(E_max > 0.0)) throw std::invalid_argument("theoretical_node_count: E_max must be positive");
    if (E_max > eps_th) {
        const double rho1 = 1.0 / std::log((M_w + 1.0) / std::numbers::e);
        return M_w + static_cast<int>(std::ceil(rho1 * std::log(E_max / eps_th)));
    }
    if (E_max < kappa * eps_th) {
        const double rho2 = 1.0 / std::log((M_under + 1.0) / std::numbers::e);
        return M_w + static_cast<int>(std::floor(rho2 * std::log(E_max / (kappa * eps_th))));
    }
    return M_w;
}

double decay_bound(double C_w, int M_w) {
    if (M_w < 2) throw DomainError("decay_bound requires M >= 2");
    if (C_w < 0.0) throw std::invalid_argument("decay_bound: C must be nonnegative");
    return C_w * std::pow((M_w + 1.0) / std::numbers::e, -M_w);
}

}  // namespace chebwin
