#include "stpanel/forward_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "stpanel/cooks.hpp"

namespace stpanel {

namespace {

std::vector<int> smallest_abs(const Eigen::VectorXd& residuals, int count) {
    std::vector<int> idx(residuals.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        const double ra = std::abs(residuals(a)), rb = std::abs(residuals(b));
        if (ra != rb) return ra < rb;
        return a < b;  // deterministic tie-break
    });
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m, const std::vector<int>& rows) {
    Eigen::MatrixXd out(rows.size(), m.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(r) = m.row(rows[r]);
    return out;
}

Eigen::VectorXd take_rows(const Eigen::VectorXd& v, const std::vector<int>& rows) {
    Eigen::VectorXd out(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) out(r) = v(rows[r]);
    return out;
}

} // namespace

ForwardSearchTrace forward_search(const Eigen::MatrixXd& design,
                                  const Eigen::VectorXd& targets, int l, double tau,
                                  int n_w_cols) {
    const int n = static_cast<int>(design.rows());
    const int k = static_cast<int>(design.cols());
    if (l < k + 1 || l >= n)
        throw DimensionMismatch("initial subset size l=" + std::to_string(l) +
                                " must satisfy params+1 <= l < N=" + std::to_string(n));

    ForwardSearchTrace trace;
    trace.full_fit = fit_ols(design, targets, n_w_cols);

    std::vector<int> subset = smallest_abs(trace.full_fit.residuals, l);
    Eigen::VectorXd all_resid = trace.full_fit.residuals;

    bool have_prev = false;
    double prev_d = 0.0;
    ModelFit prev_fit;

    for (int size = l; size <= n; ++size) {
        ForwardSearchStep step;
        step.subset = subset;

        bool fitted = false;
        ModelFit sfit;
        try {
            sfit = fit_ols(take_rows(design, subset), take_rows(targets, subset),
                           n_w_cols);
            fitted = true;
        } catch (const RankDeficient& err) {
            if (size == l)
                throw InitialSubsetSingular(std::string("initial subset: ") + err.what());
            step.rank_deficient = true;
            step.max_cooks_d = std::numeric_limits<double>::quiet_NaN();
        }

        if (fitted) {
            step.delta_hat = sfit.delta_hat;
            step.max_cooks_d = max_cooks_distance(sfit);
            all_resid = targets - design * sfit.coefficients;

            if (have_prev && std::abs(step.max_cooks_d - prev_d) > tau) {
                trace.stop_iteration = trace.steps.size() - 1;
                trace.robust_fit = prev_fit;
                trace.steps.push_back(std::move(step));
                return trace;
            }
            have_prev = true;
            prev_d = step.max_cooks_d;
            prev_fit = sfit;
        }

        trace.steps.push_back(std::move(step));
        if (size == n) break;
        subset = smallest_abs(all_resid, size + 1);
    }

    // Never triggered: the robust estimate is the full-sample fit.
    trace.robust_fit = trace.full_fit;
    return trace;
}

int default_subset_size(int n_units) {
    return (n_units + 1) / 2;
}

PanelSearchResult forward_search_panel(const PanelDataset& dataset, int l, double tau) {
    dataset.validate();
    const int n = dataset.n_units;
    const int t_count = dataset.n_times;
    const int params = dataset.n_params();
    const int q = dataset.n_w_columns();
    const int l_eff = l > 0 ? l : default_subset_size(n);
    if (l_eff < params + 2)
        throw ConfigError("initial subset size " + std::to_string(l_eff) +
                          " below params+2 = " + std::to_string(params + 2));
    if (l_eff >= n)
        throw ConfigError("initial subset size must be < N");

    PanelSearchResult res;
    res.traces.reserve(t_count);
    res.robust_delta.resize(t_count, q);
    res.full_delta.resize(t_count, q);

    std::string first_failure;
    for (int t = 0; t < t_count; ++t) {
        try {
            auto trace = forward_search(dataset.cross_section_design(t),
                                        dataset.cross_section_response(t), l_eff, tau, q);
            res.robust_delta.row(t) = trace.robust_fit.delta_hat.transpose();
            res.full_delta.row(t) = trace.full_fit.delta_hat.transpose();
            res.traces.push_back(std::move(trace));
        } catch (const Error& err) {
            if (first_failure.empty())
                first_failure = "t=" + std::to_string(t) + ": " + err.what();
        }
    }
    if (!first_failure.empty())
        throw UnestimableTimePoint(first_failure);
    return res;
}

} // namespace stpanel
