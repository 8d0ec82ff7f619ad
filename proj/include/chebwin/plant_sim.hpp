#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace chebwin {

class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Autonomous plant dx/dt = F(x).
struct PlantSpec {
    std::string name;
    int dimension = 0;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> rhs;
    std::map<std::string, double> params;
};

/// dx1 = (a - r^2) x1 - omega x2, dx2 = (a - r^2) x2 + omega x1.
[[nodiscard]] PlantSpec stuart_landau(double a = 0.5, double omega = 1.5);
/// dx1 = x2, dx2 = mu (1 - x1^2) x2 - x1.
[[nodiscard]] PlantSpec van_der_pol(double mu = 1.0);
/// dx = A x with A = [[lambda, -omega], [omega, lambda]].
[[nodiscard]] PlantSpec damped_rotation(double lambda = -0.1, double omega = 1.0);
/// dx = A x with a random Hurwitz A of size n drawn from `seed`.
[[nodiscard]] PlantSpec random_linear(int n, std::uint64_t seed);

/// Builds a plant by name ("stuart_landau", "van_der_pol", "damped_rotation",
/// "random_linear"). Unknown parameters are rejected.
[[nodiscard]] PlantSpec make_plant(const std::string& name, const std::map<std::string, double>& params,
                                   std::uint64_t seed = 0);

[[nodiscard]] Eigen::VectorXd plant_rhs(const PlantSpec& spec, const Eigen::VectorXd& x);

/// States on a uniform grid t0 + i * step.
class Trace {
  public:
    Trace(double t0, double step, std::vector<Eigen::VectorXd> states);

    [[nodiscard]] double t0() const { return t0_; }
    [[nodiscard]] double step() const { return step_; }
    [[nodiscard]] double t_end() const { return t0_ + step_ * static_cast<double>(states_.size() - 1); }
    [[nodiscard]] std::size_t size() const { return states_.size(); }
    [[nodiscard]] double time(std::size_t i) const { return t0_ + step_ * static_cast<double>(i); }
    [[nodiscard]] const Eigen::VectorXd& state(std::size_t i) const { return states_[i]; }

    /// Four-point Lagrange interpolation; exact on grid points. Throws
    /// std::out_of_range outside [t0, t_end].
    [[nodiscard]] Eigen::VectorXd query(double t) const;

  private:
    double t0_;
    double step_;
    std::vector<Eigen::VectorXd> states_;
};

/// Fixed-step RK4 over [0, horizon]. Throws NumericalError if the state stops
/// being finite.
[[nodiscard]] Trace simulate(const PlantSpec& spec, const Eigen::VectorXd& x0, double horizon, double step);

}  // namespace chebwin
