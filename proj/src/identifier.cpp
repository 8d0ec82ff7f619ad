#include "chebwin/identifier.hpp"

#include <cmath>
#include <sstream>

namespace chebwin {

RegularizerConfig RegularizerConfig::ridge(int M, int dimension, double ridge) {
    if (ridge < 0.0) throw std::invalid_argument("ridge must be nonnegative");
    RegularizerConfig r;
    r.R0 = ridge * Eigen::MatrixXd::Identity(M + 1, M + 1);
    r.eta0 = Eigen::MatrixXd::Zero(M + 1, dimension);
    return r;
}

Eigen::MatrixXd design_matrix(const WindowRecord& record) {
    const int n = record.M + 1;
    Eigen::MatrixXd T(n, static_cast<Eigen::Index>(record.node_times.size()));
    for (std::size_t k = 0; k < record.node_times.size(); ++k) {
        T.col(static_cast<Eigen::Index>(k)) = eval_shifted_basis(record.node_times[k], record.interval, record.M);
    }
    return T;
}

CoefficientSet fit_window(const WindowRecord& record, const RegularizerConfig& reg) {
    const int n = record.M + 1;
    const Eigen::MatrixXd& Xdot = record.derivative_estimates;
    if (Xdot.rows() != n || static_cast<int>(record.node_times.size()) != n) {
        throw std::invalid_argument("fit_window: record is incomplete");
    }
    if (reg.R0.rows() != n || reg.R0.cols() != n || reg.eta0.rows() != n || reg.eta0.cols() != Xdot.cols()) {
        throw std::invalid_argument("fit_window: regularizer dimensions do not match the record");
    }

    const Eigen::MatrixXd T = design_matrix(record);
    CoefficientSet out;
    out.window_index = record.index;
    out.kind = CoefficientKind::Eta;

    if (reg.R0.isZero(0.0)) {
        // Square interpolation: T^T eta = Xdot.
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(T.transpose());
        qr.setThreshold(1e-13);
        if (qr.rank() < n) throw SingularSystemError("fit_window: node design matrix is singular");
        out.matrix = qr.solve(Xdot);
        return out;
    }

    const Eigen::MatrixXd A = T * T.transpose() + reg.R0;
    const Eigen::MatrixXd rhs = reg.R0 * reg.eta0 + T * Xdot;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success && llt.rcond() > 1e-15) {
        out.matrix = llt.solve(rhs);
        return out;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-13);
    if (qr.rank() < n) throw SingularSystemError("fit_window: T T^T + R0 is singular");
    out.matrix = qr.solve(rhs);
    return out;
}

Eigen::MatrixXd continuity_matrix(const Interval& iv_new, int M) {
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(M + 1, M + 1);
    for (int p = 0; p <= M; ++p) {
        C.row(p) = eval_shifted_basis(iv_new.a, iv_new, M, p).transpose();
    }
    return C;
}

CoefficientSet solve_theta(const CoefficientSet& eta_prev, const Interval& iv_prev, const Interval& iv_new) {
    const double scale = std::max(std::abs(iv_prev.b), iv_prev.width());
    if (std::abs(iv_prev.b - iv_new.a) > 1e-12 * scale) {
        throw std::invalid_argument("solve_theta: windows are not adjacent");
    }
    if (std::abs(iv_prev.width() - iv_new.width()) > 1e-12 * iv_new.width()) {
        std::ostringstream os;
        os << "solve_theta: window widths differ (" << iv_prev.width() << " vs " << iv_new.width() << ")";
        throw std::invalid_argument(os.str());
    }

    const int M = eta_prev.degree();
    Eigen::MatrixXd rhs(M + 1, eta_prev.dimension());
    for (int p = 0; p <= M; ++p) {
        rhs.row(p) = eval_shifted_basis(iv_prev.b, iv_prev, M, p).transpose() * eta_prev.matrix;
    }

    const Eigen::MatrixXd C = continuity_matrix(iv_new, M);
    CoefficientSet theta;
    theta.window_index = eta_prev.window_index + 1;
    theta.kind = CoefficientKind::Theta;
    theta.matrix = C.triangularView<Eigen::Upper>().solve(rhs);
    return theta;
}

Eigen::VectorXd predict_dynamics(const CoefficientSet& coeffs, const Interval& iv, double t, Extrapolation ext) {
    return coeffs.matrix.transpose() * eval_shifted_basis(t, iv, coeffs.degree(), 0, ext);
}

}  // namespace chebwin
