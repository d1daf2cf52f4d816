#pragma once

#include <Eigen/Dense>

#include "stpanel/errors.hpp"

namespace stpanel {

/// AR(1) fit on a residual series: e_t = rho * e_{t-1} + a_t.
struct Ar1Fit {
    double rho_hat = 0.0;            // clamped into (-0.999, 0.999)
    Eigen::VectorXd innovations;     // a_t = e_t - rho_hat * e_{t-1}, length T-1
    double innovation_variance = 0.0;
};

/// Bound used when clamping rho_hat so sieve replication stays stationary.
inline constexpr double kRhoClamp = 0.999;

/// Conditional least squares of e_t on e_{t-1}, no intercept (OLS residuals
/// are already mean-zero). Throws DegenerateSeries when sum(e_{t-1}^2) == 0,
/// DimensionMismatch when the series is shorter than 3.
Ar1Fit fit_ar1(const Eigen::VectorXd& series);

} // namespace stpanel
