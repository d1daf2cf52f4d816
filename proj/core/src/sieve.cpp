#include "stpanel/sieve.hpp"

#include <atomic>
#include <random>

#include "stpanel/ols.hpp"
#include "stpanel/parallel.hpp"
#include "stpanel/rng.hpp"

namespace stpanel {

std::vector<double> RhoMatrix::flatten() const {
    std::vector<double> out;
    out.reserve(total());
    for (const auto& row : estimates) out.insert(out.end(), row.begin(), row.end());
    return out;
}

std::vector<Eigen::VectorXd> sieve_replicate(const Eigen::VectorXd& innovations,
                                             double rho_hat, int length, int count,
                                             std::uint64_t seed) {
    if (innovations.size() == 0)
        throw DimensionMismatch("sieve_replicate needs a nonempty innovation set");
    if (std::abs(rho_hat) >= 1.0)
        throw ConfigError("sieve_replicate requires |rho_hat| < 1");
    if (count < 0 || length < 0) throw ConfigError("negative count or length");

    const Eigen::VectorXd centered =
        innovations.array() - innovations.mean();
    const auto n_innov = centered.size();

    std::vector<Eigen::VectorXd> out(count);
    for (int k = 0; k < count; ++k) {
        Engine eng = make_engine(derive_seed(seed, static_cast<std::uint64_t>(k)));
        std::uniform_int_distribution<Eigen::Index> pick(0, n_innov - 1);
        double e = 0.0;
        for (int b = 0; b < kSieveBurnIn; ++b) e = rho_hat * e + centered(pick(eng));
        Eigen::VectorXd series(length);
        for (int t = 0; t < length; ++t) {
            e = rho_hat * e + centered(pick(eng));
            series(t) = e;
        }
        out[k] = std::move(series);
    }
    return out;
}

RhoMatrix collect_rho_estimates(const PanelDataset& dataset, const SieveOptions& opts) {
    dataset.validate();
    if (opts.m < 1) throw ConfigError("replicate count m must be >= 1");

    const int n = dataset.n_units;
    const int q = opts.include_w ? dataset.n_w_columns() : 0;

    RhoMatrix result;
    result.m = opts.m;
    result.master_seed = opts.master_seed;
    result.estimates.assign(n, {});
    result.failures_per_unit.assign(n, 0);

    // Numerically-zero re-fit residual threshold, relative to the pseudo
    // response scale.
    constexpr double kZeroResidual = 1e-12;

    std::vector<std::string> unit_errors(n);

    parallel_for(static_cast<std::size_t>(n), opts.n_workers, [&](std::size_t ui) {
        const int i = static_cast<int>(ui);
        try {
            Eigen::MatrixXd design = dataset.unit_design(i);
            if (!opts.include_w && dataset.n_w_columns() > 0)
                design = design.leftCols(1 + dataset.n_covariates()).eval();
            const Eigen::VectorXd y_i = dataset.unit_response(i);

            const ModelFit base = fit_ols(design, y_i, q);
            const Ar1Fit ar = fit_ar1(base.residuals);

            const auto replicates =
                sieve_replicate(ar.innovations, ar.rho_hat, dataset.n_times, opts.m,
                                derive_seed(opts.master_seed, static_cast<std::uint64_t>(i)));

            auto& row = result.estimates[ui];
            row.reserve(opts.m);
            const double scale = std::max(1.0, y_i.cwiseAbs().maxCoeff());
            for (const auto& e_star : replicates) {
                try {
                    const Eigen::VectorXd y_star = base.fitted + e_star;
                    const ModelFit refit = fit_ols(design, y_star, q);
                    if (refit.residuals.cwiseAbs().maxCoeff() <= kZeroResidual * scale) {
                        row.push_back(ar.rho_hat);
                        continue;
                    }
                    row.push_back(fit_ar1(refit.residuals).rho_hat);
                } catch (const Error&) {
                    ++result.failures_per_unit[ui];
                }
            }
        } catch (const Error& err) {
            unit_errors[ui] = err.what();
        }
    });

    for (int i = 0; i < n; ++i) {
        if (!unit_errors[i].empty() || result.estimates[i].empty())
            throw UnestimableUnit("unit " + std::to_string(i) +
                                  " produced no usable replicates" +
                                  (unit_errors[i].empty() ? "" : ": " + unit_errors[i]));
    }
    return result;
}

} // namespace stpanel
