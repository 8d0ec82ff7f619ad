#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace chebwin {

/// Tolerance on |x| <= 1 that absorbs rounding from the affine map.
inline constexpr double kDomainTol = 1e-12;

/// Thrown when a Chebyshev argument falls outside [-1, 1] (or outside an
/// interval without extrapolation enabled).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Thrown when a least-squares system cannot be solved to working precision.
class RankDeficientError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Closed interval [a, b] with a < b.
struct Interval {
    double a = 0.0;
    double b = 1.0;

    Interval() = default;
    Interval(double lo, double hi);

    [[nodiscard]] double width() const { return b - a; }
    [[nodiscard]] double mid() const { return 0.5 * (a + b); }
    [[nodiscard]] bool contains(double t) const { return t >= a && t <= b; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

enum class Extrapolation { Forbid, Allow };

/// [T_0(x), ..., T_M(x)] by the three-term recurrence.
[[nodiscard]] Eigen::VectorXd eval_basis(double x, int M);

/// p-th derivatives [T_0^(p)(x), ..., T_M^(p)(x)], computed by differentiating
/// the recurrence: T_i^(p) = 2x T_{i-1}^(p) + 2p T_{i-1}^(p-1) - T_{i-2}^(p).
[[nodiscard]] Eigen::VectorXd eval_basis_derivative(double x, int M, int p);

/// Roots of T_N: x_k = cos((k - 0.5) pi / N), k = 1..N (descending).
[[nodiscard]] std::vector<double> chebyshev_nodes(int N);

/// Maps x in [-1, 1] onto iv.
[[nodiscard]] double shift_point(double x, const Interval& iv);

/// Inverse of shift_point; no domain check.
[[nodiscard]] double unshift_point(double t, const Interval& iv);

/// Shifted basis on iv, scaled by (2 / (b - a))^p for p >= 1.
[[nodiscard]] Eigen::VectorXd eval_shifted_basis(double t, const Interval& iv, int M, int p = 0,
                                                 Extrapolation ext = Extrapolation::Forbid);

struct FitResult {
    Eigen::VectorXd coefficients;
    double residual_norm = 0.0;
    std::optional<double> bound;
};

struct Sample {
    double x;
    double y;
};

/// Least-squares fit of y ~ sum_i c_i T_i^S(x) on iv via column-pivoted QR of
/// the design matrix. When `derivative_bound` is given the interpolation bound
/// for degree M is attached.
[[nodiscard]] FitResult offline_fit(std::span<const Sample> samples, const Interval& iv, int M,
                                    std::optional<double> derivative_bound = std::nullopt);

/// Evaluates sum_i c_i T_i^S(t).
[[nodiscard]] double eval_series(const Eigen::VectorXd& coefficients, double t, const Interval& iv,
                                 Extrapolation ext = Extrapolation::Forbid);

/// 2 D / (N+1)! * ((b - a) / 4)^(N+1), evaluated in log space.
[[nodiscard]] double error_bound(double D, const Interval& iv, int N);

}  // namespace chebwin
