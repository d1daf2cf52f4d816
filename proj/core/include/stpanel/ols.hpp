#pragma once

#include <Eigen/Dense>

#include "stpanel/errors.hpp"

namespace stpanel {

/// Result of one least-squares regression. beta_hat holds the intercept and
/// covariate coefficients, delta_hat the coefficients of the trailing
/// neighborhood columns (empty when the design carries none).
struct ModelFit {
    Eigen::VectorXd coefficients;  // all columns, design order
    Eigen::VectorXd beta_hat;      // leading 1 + p coefficients
    Eigen::VectorXd delta_hat;     // trailing q coefficients
    Eigen::VectorXd residuals;     // observed - fitted
    Eigen::VectorXd fitted;
    Eigen::VectorXd leverage;      // hat-matrix diagonal, in [0, 1]
    double sigma2_hat = 0.0;       // SSR / (n - k)
    int n_obs = 0;
    int n_params = 0;
};

/// Relative rank tolerance for the QR factorization: a diagonal of R is
/// treated as zero when below tol * |largest diagonal|.
inline constexpr double kRankTolerance = 1e-10;

/// Ordinary least squares via column-pivoted Householder QR.
///
/// `n_w_cols` names how many trailing design columns belong to the
/// neighborhood variable; it only controls the beta/delta split.
///
/// Throws DimensionMismatch on inconsistent extents or too few rows,
/// RankDeficient when the design is singular beyond kRankTolerance.
ModelFit fit_ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets,
                 int n_w_cols = 0);

} // namespace stpanel
