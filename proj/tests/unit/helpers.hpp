#pragma once

#include <Eigen/Dense>
#include <random>

#include "stpanel/ols.hpp"

namespace test_helpers {

inline Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = dist(eng);
    return m;
}

inline Eigen::VectorXd random_vector(int rows, std::uint64_t seed) {
    return random_matrix(rows, 1, seed).col(0);
}

/// Independent OLS oracle: explicit normal-equations solve with a matrix
/// inverse, deliberately avoiding the QR path used by the library.
inline Eigen::VectorXd normal_equations_solve(const Eigen::MatrixXd& design,
                                              const Eigen::VectorXd& targets) {
    const Eigen::MatrixXd xtx = design.transpose() * design;
    return xtx.inverse() * (design.transpose() * targets);
}

/// Independent Cook's D oracle: actual leave-one-out refit,
/// D_i = ||fitted_full - fitted_without_i||^2 / (params * s^2).
inline double loo_cooks_oracle(const Eigen::MatrixXd& design,
                               const Eigen::VectorXd& targets, int drop) {
    const int n = static_cast<int>(design.rows());
    const int k = static_cast<int>(design.cols());
    Eigen::MatrixXd d_red(n - 1, k);
    Eigen::VectorXd y_red(n - 1);
    int r = 0;
    for (int i = 0; i < n; ++i) {
        if (i == drop) continue;
        d_red.row(r) = design.row(i);
        y_red(r) = targets(i);
        ++r;
    }
    const Eigen::VectorXd coef_full = normal_equations_solve(design, targets);
    const Eigen::VectorXd coef_red = normal_equations_solve(d_red, y_red);
    const Eigen::VectorXd diff = design * (coef_full - coef_red);
    const Eigen::VectorXd resid = targets - design * coef_full;
    const double s2 = resid.squaredNorm() / (n - k);
    return diff.squaredNorm() / (k * s2);
}

/// Simulated AR(1) path with normal innovations, burn-in 100.
inline Eigen::VectorXd simulate_ar1(double rho, double innovation_sd, int length,
                                    std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> innov(0.0, innovation_sd);
    double e = 0.0;
    for (int b = 0; b < 100; ++b) e = rho * e + innov(eng);
    Eigen::VectorXd out(length);
    for (int t = 0; t < length; ++t) {
        e = rho * e + innov(eng);
        out(t) = e;
    }
    return out;
}

} // namespace test_helpers
