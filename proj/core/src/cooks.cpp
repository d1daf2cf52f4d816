#include "stpanel/cooks.hpp"

#include <limits>
#include <string>

namespace stpanel {

namespace {
constexpr double kLeverageTol = 1e-8;
}

double cooks_distance(const ModelFit& fit, int i) {
    if (i < 0 || i >= fit.n_obs)
        throw DimensionMismatch("observation index out of range");
    if (fit.sigma2_hat <= 0.0)
        throw ConfigError("cooks_distance requires s^2 > 0");
    const double h = fit.leverage(i);
    if (h >= 1.0 - kLeverageTol)
        throw LeverageOne("leverage " + std::to_string(h) + " at observation " +
                          std::to_string(i));
    const double e = fit.residuals(i);
    return (e * e / (fit.n_params * fit.sigma2_hat)) * (h / ((1.0 - h) * (1.0 - h)));
}

double max_cooks_distance(const ModelFit& fit) {
    double best = 0.0;
    for (int i = 0; i < fit.n_obs; ++i) {
        double d;
        try {
            d = cooks_distance(fit, i);
        } catch (const LeverageOne&) {
            return std::numeric_limits<double>::infinity();
        }
        best = std::max(best, d);
    }
    return best;
}

} // namespace stpanel
