#include "stpanel/ols.hpp"

#include <string>

namespace stpanel {

ModelFit fit_ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets,
                 int n_w_cols) {
    const auto n = design.rows();
    const auto k = design.cols();
    if (targets.size() != n)
        throw DimensionMismatch("design has " + std::to_string(n) + " rows, targets " +
                                std::to_string(targets.size()));
    if (n <= k)
        throw DimensionMismatch("need more rows (" + std::to_string(n) +
                                ") than parameters (" + std::to_string(k) + ")");
    if (n_w_cols < 0 || n_w_cols > k)
        throw DimensionMismatch("invalid n_w_cols");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(kRankTolerance);
    if (qr.rank() < k)
        throw RankDeficient("design rank " + std::to_string(qr.rank()) + " < " +
                            std::to_string(k) + " columns");

    ModelFit fit;
    fit.n_obs = static_cast<int>(n);
    fit.n_params = static_cast<int>(k);
    fit.coefficients = qr.solve(targets);
    fit.beta_hat = fit.coefficients.head(k - n_w_cols);
    fit.delta_hat = fit.coefficients.tail(n_w_cols);
    fit.fitted = design * fit.coefficients;
    fit.residuals = targets - fit.fitted;
    fit.sigma2_hat = fit.residuals.squaredNorm() / static_cast<double>(n - k);

    // Hat diagonal from the thin Q factor: h_ii = || row i of Q_k ||^2.
    Eigen::MatrixXd thin_q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
    fit.leverage = thin_q.rowwise().squaredNorm();
    return fit;
}

} // namespace stpanel
