#pragma once

#include <Eigen/Dense>

namespace stockcast::detail {

struct LeastSquares {
    Eigen::VectorXd beta;
    Eigen::VectorXd residuals;
    double ssr = 0.0;
    Eigen::Index rank = 0;
};

/// Column-pivoted QR least squares. rank < cols signals a collinear design.
inline LeastSquares least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    LeastSquares out;
    out.rank = qr.rank();
    out.beta = qr.solve(y);
    out.residuals = y - x * out.beta;
    out.ssr = out.residuals.squaredNorm();
    return out;
}

}  // namespace stockcast::detail
