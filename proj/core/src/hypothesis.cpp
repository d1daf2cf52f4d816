#include "stpanel/hypothesis.hpp"

#include <cmath>
#include <limits>

#include "stpanel/ar1.hpp"
#include "stpanel/ols.hpp"
#include "stpanel/rng.hpp"

namespace stpanel {

namespace {

int default_n(std::size_t pool) {
    return static_cast<int>((pool + 1) / 2);
}

std::vector<double> column(const Eigen::MatrixXd& m, int j) {
    std::vector<double> out(m.rows());
    for (int i = 0; i < m.rows(); ++i) out[i] = m(i, j);
    return out;
}

/// Mean of the per-unit direct AR(1) estimates on OLS residuals.
double mean_direct_rho(const PanelDataset& dataset) {
    double sum = 0.0;
    for (int i = 0; i < dataset.n_units; ++i) {
        const ModelFit fit = fit_ols(dataset.unit_design(i), dataset.unit_response(i),
                                     dataset.n_w_columns());
        sum += fit_ar1(fit.residuals).rho_hat;
    }
    return sum / dataset.n_units;
}

/// y with the neighborhood component removed and the W columns dropped.
PanelDataset partial_residual_panel(const PanelDataset& dataset,
                                    const Eigen::VectorXd& delta) {
    PanelDataset out = dataset;
    for (int j = 0; j < dataset.n_w_columns(); ++j) out.y -= delta(j) * dataset.w[j];
    out.w.clear();
    return out;
}

/// AR(1) quasi-difference of every series; the first observation is kept
/// unweighted.
Eigen::MatrixXd quasi_difference(const Eigen::MatrixXd& m, double rho) {
    Eigen::MatrixXd out = m;
    out.rightCols(m.cols() - 1) -= rho * m.leftCols(m.cols() - 1);
    return out;
}

PanelDataset quasi_difference_panel(const PanelDataset& dataset, double rho) {
    PanelDataset out = dataset;
    out.y = quasi_difference(dataset.y, rho);
    for (auto& xm : out.x) xm = quasi_difference(xm, rho);
    for (auto& wm : out.w) wm = quasi_difference(wm, rho);
    return out;
}

TestOutcome from_coordinates(std::string name, std::vector<CoordinateOutcome> coords,
                             const TestSettings& settings, std::size_t n_checked) {
    TestOutcome out;
    out.test_name = std::move(name);
    out.alpha = settings.alpha;
    out.settings = settings;
    out.n_statistics_checked = n_checked;
    std::size_t driving = 0;
    for (std::size_t j = 0; j < coords.size(); ++j) {
        out.reject = out.reject || coords[j].reject;
        if (coords[j].fraction_outside > coords[driving].fraction_outside) driving = j;
    }
    out.fraction_outside = coords[driving].fraction_outside;
    out.ci = coords[driving].ci;
    out.per_item_outside = coords[driving].outside;
    out.coordinates = std::move(coords);
    return out;
}

TestOutcome structural_phase2(const RhoMatrix& rho_mat, const TestSettings& settings) {
    const std::vector<double> flat = rho_mat.flatten();
    const int n = settings.n > 0 ? settings.n : default_n(flat.size());
    CoordinateOutcome coord =
        decide(flat, flat, n, settings.B, settings.alpha, settings.stat_kind,
               derive_seed(settings.seed, 0x5c2ULL));
    return from_coordinates("structural-change", {std::move(coord)}, settings,
                            flat.size());
}

TestOutcome spatial_phase2(const PanelSearchResult& search,
                           const TestSettings& settings) {
    const int q = static_cast<int>(search.robust_delta.cols());
    const int t_count = static_cast<int>(search.robust_delta.rows());
    const int n = settings.n > 0 ? settings.n : default_n(t_count);
    std::vector<CoordinateOutcome> coords;
    coords.reserve(q);
    for (int j = 0; j < q; ++j) {
        coords.push_back(decide(column(search.robust_delta, j),
                                column(search.full_delta, j), n, settings.B,
                                settings.alpha, settings.stat_kind,
                                derive_seed(settings.seed, 0x5fa1ULL,
                                            static_cast<std::uint64_t>(j))));
    }
    return from_coordinates("spatial-heterogeneity", std::move(coords), settings,
                            static_cast<std::size_t>(t_count) * q);
}

} // namespace

CoordinateOutcome decide(const std::vector<double>& ci_source,
                         const std::vector<double>& compared, int n, int B,
                         double alpha, StatKind stat_kind, std::uint64_t seed) {
    CoordinateOutcome out;
    out.ci = percentile_bootstrap_ci(ci_source, n, B, alpha, stat_kind, seed);
    out.outside.resize(compared.size());
    std::size_t count = 0;
    for (std::size_t i = 0; i < compared.size(); ++i) {
        const bool o = compared[i] < out.ci.lower || compared[i] > out.ci.upper;
        out.outside[i] = o;
        if (o) ++count;
    }
    out.fraction_outside = static_cast<double>(count) / compared.size();
    out.reject = out.fraction_outside >= alpha;
    return out;
}

TestOutcome structural_change_test(const PanelDataset& dataset,
                                   const TestSettings& settings) {
    SieveOptions opts;
    opts.m = settings.m;
    opts.master_seed = derive_seed(settings.seed, 0x51e7ULL);
    opts.n_workers = settings.n_workers;
    return structural_phase2(collect_rho_estimates(dataset, opts), settings);
}

TestOutcome spatial_heterogeneity_test(const PanelDataset& dataset,
                                       const TestSettings& settings) {
    if (dataset.n_w_columns() == 0)
        throw ConfigError("spatial test needs at least one W column");
    return spatial_phase2(forward_search_panel(dataset, settings.l, settings.tau),
                          settings);
}

JointOutcome joint_test(const PanelDataset& dataset, const TestSettings& settings,
                        int max_iter, double converge_tol) {
    dataset.validate();
    if (dataset.n_w_columns() == 0)
        throw ConfigError("joint test needs at least one W column");
    if (max_iter < 1) throw ConfigError("max_iter must be >= 1");

    const int q = dataset.n_w_columns();
    double rho_cur = 0.0;
    Eigen::VectorXd delta_cur = Eigen::VectorXd::Zero(q);
    Eigen::VectorXd beta_cur = Eigen::VectorXd::Zero(1 + dataset.n_covariates());

    JointOutcome out;
    PanelSearchResult search_final;
    PanelDataset partial_final;

    for (int iter = 1; iter <= max_iter; ++iter) {
        // (a) robust spatial component on the temporally filtered panel.
        const PanelDataset filtered =
            rho_cur == 0.0 ? dataset : quasi_difference_panel(dataset, rho_cur);
        search_final = forward_search_panel(filtered, settings.l, settings.tau);
        const Eigen::VectorXd delta_new =
            search_final.robust_delta.colwise().mean().transpose();
        Eigen::VectorXd beta_new = Eigen::VectorXd::Zero(beta_cur.size());
        for (const auto& trace : search_final.traces)
            beta_new += trace.robust_fit.beta_hat;
        beta_new /= static_cast<double>(search_final.traces.size());

        // (b) temporal component on the partial residuals.
        partial_final = partial_residual_panel(dataset, delta_new);
        const double rho_new = mean_direct_rho(partial_final);

        out.last_change =
            std::max({std::abs(rho_new - rho_cur),
                      (delta_new - delta_cur).cwiseAbs().maxCoeff(),
                      (beta_new - beta_cur).cwiseAbs().maxCoeff()});
        rho_cur = rho_new;
        delta_cur = delta_new;
        beta_cur = beta_new;
        out.iterations = iter;
        if (out.last_change < converge_tol) {
            out.converged = true;
            break;
        }
    }

    // Phase II on the last iterates; non-convergence is flagged in provenance.
    SieveOptions opts;
    opts.m = settings.m;
    opts.master_seed = derive_seed(settings.seed, 0x51e7ULL);
    opts.n_workers = settings.n_workers;
    out.structural = structural_phase2(collect_rho_estimates(partial_final, opts),
                                       settings);
    out.spatial = spatial_phase2(search_final, settings);
    out.structural.converged = out.converged;
    out.structural.iterations = out.iterations;
    out.spatial.converged = out.converged;
    out.spatial.iterations = out.iterations;
    return out;
}

} // namespace stpanel
