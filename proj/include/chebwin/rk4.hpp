#pragma once

#include <Eigen/Dense>

namespace chebwin {

/// One classical fourth-order Runge-Kutta step of dx/dt = f(t, x).
template <typename Rhs>
Eigen::VectorXd rk4_step(const Rhs& f, double t, const Eigen::VectorXd& x, double h) {
    const Eigen::VectorXd k1 = f(t, x);
    const Eigen::VectorXd k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = f(t + h, x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace chebwin
