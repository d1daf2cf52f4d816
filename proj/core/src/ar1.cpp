#include "stpanel/ar1.hpp"

#include <algorithm>
#include <string>

namespace stpanel {

Ar1Fit fit_ar1(const Eigen::VectorXd& series) {
    const auto t = series.size();
    if (t < 3)
        throw DimensionMismatch("AR(1) needs a series of length >= 3, got " +
                                std::to_string(t));

    const auto lagged = series.head(t - 1);
    const auto current = series.tail(t - 1);
    const double denom = lagged.squaredNorm();
    if (denom == 0.0)
        throw DegenerateSeries("AR(1) slope undefined: all lagged values are zero");

    Ar1Fit fit;
    const double rho = current.dot(lagged) / denom;
    fit.rho_hat = std::clamp(rho, -kRhoClamp, kRhoClamp);
    fit.innovations = current - fit.rho_hat * lagged;
    fit.innovation_variance =
        fit.innovations.squaredNorm() / static_cast<double>(t - 1);
    return fit;
}

} // namespace stpanel
