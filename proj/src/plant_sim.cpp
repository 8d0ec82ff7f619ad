#include "chebwin/plant_sim.hpp"

#include "chebwin/rk4.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace chebwin {

namespace {

double param_or(const std::map<std::string, double>& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void reject_unknown(const std::map<std::string, double>& params, std::initializer_list<const char*> known,
                    const std::string& plant) {
    for (const auto& [key, value] : params) {
        if (std::none_of(known.begin(), known.end(), [&key](const char* k) { return key == k; })) {
            throw std::invalid_argument("plant '" + plant + "' has no parameter '" + key + "'");
        }
    }
}

}  // namespace

PlantSpec stuart_landau(double a, double omega) {
    PlantSpec p;
    p.name = "stuart_landau";
    p.dimension = 2;
    p.params = {{"a", a}, {"omega", omega}};
    p.rhs = [a, omega](const Eigen::VectorXd& x) {
        const double radial = a - (x[0] * x[0] + x[1] * x[1]);
        Eigen::VectorXd dx(2);
        dx[0] = radial * x[0] - omega * x[1];
        dx[1] = radial * x[1] + omega * x[0];
        return dx;
    };
    return p;
}

PlantSpec van_der_pol(double mu) {
    PlantSpec p;
    p.name = "van_der_pol";
    p.dimension = 2;
    p.params = {{"mu", mu}};
    p.rhs = [mu](const Eigen::VectorXd& x) {
        Eigen::VectorXd dx(2);
        dx[0] = x[1];
        dx[1] = mu * (1.0 - x[0] * x[0]) * x[1] - x[0];
        return dx;
    };
    return p;
}

PlantSpec damped_rotation(double lambda, double omega) {
    PlantSpec p;
    p.name = "damped_rotation";
    p.dimension = 2;
    p.params = {{"lambda", lambda}, {"omega", omega}};
    Eigen::Matrix2d A;
    A << lambda, -omega, omega, lambda;
    p.rhs = [A](const Eigen::VectorXd& x) -> Eigen::VectorXd { return A * x; };
    return p;
}

PlantSpec random_linear(int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("random_linear: dimension must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = normal(rng);
    // Shift the spectrum into the left half plane.
    const Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    const double max_re = es.eigenvalues().real().maxCoeff();
    A -= (max_re + 0.5) * Eigen::MatrixXd::Identity(n, n);

    PlantSpec p;
    p.name = "random_linear";
    p.dimension = n;
    p.params = {{"n", static_cast<double>(n)}};
    p.rhs = [A](const Eigen::VectorXd& x) -> Eigen::VectorXd { return A * x; };
    return p;
}

PlantSpec make_plant(const std::string& name, const std::map<std::string, double>& params, std::uint64_t seed) {
    if (name == "stuart_landau") {
        reject_unknown(params, {"a", "omega"}, name);
        return stuart_landau(param_or(params, "a", 0.5), param_or(params, "omega", 1.5));
    }
    if (name == "van_der_pol") {
        reject_unknown(params, {"mu"}, name);
        return van_der_pol(param_or(params, "mu", 1.0));
    }
    if (name == "damped_rotation") {
        reject_unknown(params, {"lambda", "omega"}, name);
        return damped_rotation(param_or(params, "lambda", -0.1), param_or(params, "omega", 1.0));
    }
    if (name == "random_linear") {
        reject_unknown(params, {"n"}, name);
        return random_linear(static_cast<int>(param_or(params, "n", 2.0)), seed);
    }
    throw std::invalid_argument("unknown plant '" + name + "'");
}

Eigen::VectorXd plant_rhs(const PlantSpec& spec, const Eigen::VectorXd& x) {
    if (x.size() != spec.dimension) {
        std::ostringstream os;
        os << "plant '" << spec.name << "' expects dimension " << spec.dimension << ", got " << x.size();
        throw std::invalid_argument(os.str());
    }
    return spec.rhs(x);
}

Trace::Trace(double t0, double step, std::vector<Eigen::VectorXd> states)
    : t0_(t0), step_(step), states_(std::move(states)) {
    if (!(step > 0.0)) throw std::invalid_argument("trace step must be positive");
    if (states_.size() < 4) throw std::invalid_argument("trace needs at least 4 grid points");
}

Eigen::VectorXd Trace::query(double t) const {
    const double slack = 1e-9 * step_;
    if (!(t >= t0_ - slack && t <= t_end() + slack)) {
        std::ostringstream os;
        os << "trace query at t = " << t << " outside [" << t0_ << ", " << t_end() << "]";
        throw std::out_of_range(os.str());
    }
    const double s = (t - t0_) / step_;
    const double nearest = std::round(s);
    if (std::abs(s - nearest) < 1e-9) {
        return states_[static_cast<std::size_t>(std::clamp<double>(nearest, 0.0, double(states_.size() - 1)))];
    }
    // Stencil i-1, i, i+1, i+2 around the containing cell, shifted at the ends.
    const auto last = static_cast<long>(states_.size()) - 1;
    long i = static_cast<long>(std::floor(s));
    long first = std::clamp(i - 1, 0L, last - 3);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(states_.front().size());
    for (long j = first; j < first + 4; ++j) {
        double w = 1.0;
        for (long m = first; m < first + 4; ++m) {
            if (m != j) w *= (s - static_cast<double>(m)) / static_cast<double>(j - m);
        }
        out += w * states_[static_cast<std::size_t>(j)];
    }
    return out;
}

Trace simulate(const PlantSpec& spec, const Eigen::VectorXd& x0, double horizon, double step) {
    if (!(step > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("simulate: step and horizon must be positive");
    if (x0.size() != spec.dimension) throw std::invalid_argument("simulate: initial state has wrong dimension");
    const auto n = static_cast<long>(std::lround(horizon / step));
    if (n < 3) throw std::invalid_argument("simulate: horizon must span at least 3 steps");
    const double h = horizon / static_cast<double>(n);

    std::vector<Eigen::VectorXd> states;
    states.reserve(static_cast<std::size_t>(n + 1));
    states.push_back(x0);
    auto f = [&spec](double, const Eigen::VectorXd& x) { return spec.rhs(x); };
    Eigen::VectorXd x = x0;
    for (long i = 0; i < n; ++i) {
        x = rk4_step(f, static_cast<double>(i) * h, x, h);
        if (!x.allFinite()) {
            std::ostringstream os;
            os << "plant '" << spec.name << "' diverged at t = " << static_cast<double>(i + 1) * h;
            throw NumericalError(os.str());
        }
        states.push_back(x);
    }
    return Trace(0.0, h, std::move(states));
}

}  // namespace chebwin
