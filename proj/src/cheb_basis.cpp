#include "chebwin/cheb_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace chebwin {

namespace {

void check_canonical(double x) {
    if (!(std::abs(x) <= 1.0 + kDomainTol)) {
        std::ostringstream os;
        os << "Chebyshev argument " << x << " outside [-1, 1]";
        throw DomainError(os.str());
    }
}

void check_degree(int M) {
    if (M < 0) throw std::invalid_argument("degree must be nonnegative");
}

void check_order(int p) {
    if (p < 0) throw std::invalid_argument("derivative order must be nonnegative");
}

// Row q of the table holds the q-th derivative of T_0..T_M at x.
Eigen::VectorXd derivative_row(double x, int M, int p) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(p + 1, M + 1);
    D(0, 0) = 1.0;
    if (M >= 1) D(0, 1) = x;
    for (int i = 2; i <= M; ++i) D(0, i) = 2.0 * x * D(0, i - 1) - D(0, i - 2);
    for (int q = 1; q <= p; ++q) {
        if (M >= 1) D(q, 1) = (q == 1) ? 1.0 : 0.0;
        for (int i = 2; i <= M; ++i) {
            D(q, i) = 2.0 * x * D(q, i - 1) + 2.0 * q * D(q - 1, i - 1) - D(q, i - 2);
        }
    }
    return D.row(p).transpose();
}

}  // namespace

Interval::Interval(double lo, double hi) : a(lo), b(hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        std::ostringstream os;
        os << "invalid interval [" << lo << ", " << hi << "]";
        throw std::invalid_argument(os.str());
    }
}

Eigen::VectorXd eval_basis(double x, int M) {
    check_canonical(x);
    check_degree(M);
    Eigen::VectorXd T(M + 1);
    T[0] = 1.0;
    if (M >= 1) T[1] = x;
    for (int i = 2; i <= M; ++i) T[i] = 2.0 * x * T[i - 1] - T[i - 2];
    return T;
}

Eigen::VectorXd eval_basis_derivative(double x, int M, int p) {
    check_canonical(x);
    check_degree(M);
    check_order(p);
    return derivative_row(x, M, p);
}

std::vector<double> chebyshev_nodes(int N) {
    if (N < 1) throw std::invalid_argument("node count must be positive");
    std::vector<double> nodes(static_cast<std::size_t>(N));
    for (int k = 1; k <= N; ++k) {
        nodes[static_cast<std::size_t>(k - 1)] = std::cos((k - 0.5) * std::numbers::pi / N);
    }
    return nodes;
}

double shift_point(double x, const Interval& iv) {
    check_canonical(x);
    return 0.5 * ((iv.a + iv.b) + (iv.b - iv.a) * x);
}

double unshift_point(double t, const Interval& iv) {
    return (2.0 * t - (iv.a + iv.b)) / (iv.b - iv.a);
}

Eigen::VectorXd eval_shifted_basis(double t, const Interval& iv, int M, int p, Extrapolation ext) {
    check_degree(M);
    check_order(p);
    double x = unshift_point(t, iv);
    if (ext == Extrapolation::Forbid) {
        if (!(std::abs(x) <= 1.0 + kDomainTol)) {
            std::ostringstream os;
            os << "t = " << t << " outside [" << iv.a << ", " << iv.b << "] without extrapolation";
            throw DomainError(os.str());
        }
        x = std::clamp(x, -1.0, 1.0);
    }
    Eigen::VectorXd v = derivative_row(x, M, p);
    if (p > 0) v *= std::pow(2.0 / iv.width(), p);
    return v;
}

double eval_series(const Eigen::VectorXd& coefficients, double t, const Interval& iv, Extrapolation ext) {
    const int M = static_cast<int>(coefficients.size()) - 1;
    return coefficients.dot(eval_shifted_basis(t, iv, M, 0, ext));
}

FitResult offline_fit(std::span<const Sample> samples, const Interval& iv, int M,
                      std::optional<double> derivative_bound) {
    check_degree(M);
    const auto m = static_cast<Eigen::Index>(samples.size());
    if (m < M + 1) throw RankDeficientError("offline_fit needs at least M+1 samples");

    Eigen::MatrixXd X(m, M + 1);
    Eigen::VectorXd Y(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const auto& s = samples[static_cast<std::size_t>(k)];
        if (!iv.contains(s.x)) {
            std::ostringstream os;
            os << "sample abscissa " << s.x << " outside [" << iv.a << ", " << iv.b << "]";
            throw DomainError(os.str());
        }
        X.row(k) = eval_shifted_basis(s.x, iv, M).transpose();
        Y[k] = s.y;
    }

    // cond(X^T X) = cond(X)^2
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
    const auto& sv = svd.singularValues();
    const double smin = sv[sv.size() - 1];
    if (smin == 0.0 || (sv[0] / smin) * (sv[0] / smin) > 1e12) {
        throw RankDeficientError("design matrix is rank deficient to working precision");
    }

    FitResult r;
    r.coefficients = X.colPivHouseholderQr().solve(Y);
    r.residual_norm = (X * r.coefficients - Y).norm();
    if (derivative_bound) r.bound = error_bound(*derivative_bound, iv, M);
    return r;
}

double error_bound(double D, const Interval& iv, int N) {
    if (!std::isfinite(D) || D < 0.0) throw std::invalid_argument("derivative bound must be finite and >= 0");
    check_degree(N);
    if (D == 0.0) return 0.0;
    const double n1 = N + 1.0;
    const double log_val = std::log(2.0 * D) - std::lgamma(n1 + 1.0) + n1 * std::log(iv.width() / 4.0);
    return std::exp(log_val);
}

}  // namespace chebwin
