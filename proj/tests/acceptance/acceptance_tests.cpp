// End-to-end acceptance checks. Each test case prints a single
// "criterion N ... PASS/FAIL" line in addition to its assertions, so the
// run log doubles as an acceptance report.

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>
#include <thread>
#include <vector>

#include "stpanel/ar1.hpp"
#include "stpanel/bootstrap.hpp"
#include "stpanel/cooks.hpp"
#include "stpanel/dgp.hpp"
#include "stpanel/experiment.hpp"
#include "stpanel/forward_search.hpp"
#include "stpanel/hypothesis.hpp"
#include "stpanel/ols.hpp"
#include "stpanel/parallel.hpp"

using namespace stpanel;

namespace {

int hw_workers() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 4 : static_cast<int>(std::min(hc, 8u));
}

void report(int criterion, const char* what, bool ok) {
    std::printf("criterion %d (%s): %s\n", criterion, what, ok ? "PASS" : "FAIL");
    std::fflush(stdout);
}

Eigen::MatrixXd random_design(int n, int k, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::MatrixXd m(n, k);
    m.col(0).setOnes();
    for (int i = 0; i < n; ++i)
        for (int j = 1; j < k; ++j) m(i, j) = dist(eng);
    return m;
}

Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = dist(eng);
    return v;
}

PanelDataset make_panel(int n, int t, std::uint64_t seed,
                        std::optional<ChangeSpec> change = {},
                        std::optional<HeteroSpec> hetero = {}) {
    DgpConfig cfg;
    cfg.n_units = n;
    cfg.n_times = t;
    cfg.r2_target = 0.95;
    cfg.master_seed = seed;
    cfg.change_spec = change;
    cfg.hetero_spec = hetero;
    return generate(cfg).dataset;
}

double coverage_of(const TestOutcome& out) {
    return 100.0 * (1.0 - out.fraction_outside);
}

// Exact one-sided binomial sign test: P(X >= wins) for X ~ Bin(n, 1/2).
double sign_test_p(int wins, int n_informative) {
    if (n_informative == 0) return 1.0;
    double p = 0.0;
    for (int k = wins; k <= n_informative; ++k) {
        const double log_c = std::lgamma(n_informative + 1.0) -
                             std::lgamma(k + 1.0) -
                             std::lgamma(n_informative - k + 1.0);
        p += std::exp(log_c - n_informative * std::log(2.0));
    }
    return std::min(p, 1.0);
}

struct PairedPowerResult {
    double mean_null = 0.0;
    double mean_alt = 0.0;
    int wins = 0;       // alternative coverage strictly below the null's
    int informative = 0;
    double p_value = 1.0;
};

template <typename RunPair>
PairedPowerResult paired_power(int reps, RunPair run_pair) {
    std::vector<std::pair<double, double>> pairs(reps);
    parallel_for(reps, hw_workers(),
                 [&](std::size_t r) { pairs[r] = run_pair(static_cast<int>(r)); });
    PairedPowerResult res;
    for (const auto& [null_cov, alt_cov] : pairs) {
        res.mean_null += null_cov;
        res.mean_alt += alt_cov;
        if (alt_cov < null_cov) ++res.wins;
        if (alt_cov != null_cov) ++res.informative;
    }
    res.mean_null /= reps;
    res.mean_alt /= reps;
    res.p_value = sign_test_p(res.wins, res.informative);
    return res;
}

} // namespace

TEST_CASE("criterion 1: oracle equivalence of fit_ols and cooks_distance") {
    bool ok = true;

    for (int r = 0; r < 100; ++r) {
        const int n = 30 + (r % 40);
        const int k = 2 + (r % 4);
        const Eigen::MatrixXd design = random_design(n, k, 100 + r);
        const Eigen::VectorXd y = random_vector(n, 500 + r);
        const ModelFit fit = fit_ols(design, y);
        // explicit normal-equations oracle
        const Eigen::MatrixXd xtx = design.transpose() * design;
        const Eigen::VectorXd oracle = xtx.inverse() * (design.transpose() * y);
        if ((fit.coefficients - oracle).cwiseAbs().maxCoeff() > 1e-8) ok = false;
    }

    for (int r = 0; r < 100; ++r) {
        const int n = 20 + (r % 20);
        const int k = 2 + (r % 3);
        const Eigen::MatrixXd design = random_design(n, k, 900 + r);
        const Eigen::VectorXd y = random_vector(n, 1300 + r);
        const ModelFit fit = fit_ols(design, y);
        const int i = r % n;
        // leave-one-out oracle: refit without row i, compare predictions
        Eigen::MatrixXd d2(n - 1, k);
        Eigen::VectorXd y2(n - 1);
        int row = 0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            d2.row(row) = design.row(j);
            y2(row) = y(j);
            ++row;
        }
        const ModelFit loo = fit_ols(d2, y2);
        const Eigen::VectorXd diff = design * (fit.coefficients - loo.coefficients);
        const double oracle_d =
            diff.squaredNorm() / (k * fit.sigma2_hat);
        if (std::abs(cooks_distance(fit, i) - oracle_d) > 1e-10) ok = false;
    }

    report(1, "oracle equivalence", ok);
    CHECK(ok);
}

TEST_CASE("criterion 2: AR(1) estimator fidelity") {
    int hits = 0;
    for (int r = 0; r < 100; ++r) {
        std::mt19937_64 eng(2000 + r);
        std::normal_distribution<double> innov(0.0, 2.0);
        const int t_len = 5000;
        Eigen::VectorXd series(t_len);
        double prev = 0.0;
        for (int t = -100; t < t_len; ++t) {
            prev = 0.5 * prev + innov(eng);
            if (t >= 0) series(t) = prev;
        }
        const double rho = fit_ar1(series).rho_hat;
        if (rho >= 0.45 && rho <= 0.55) ++hits;
    }
    const bool ok = hits >= 95;
    std::printf("  fit_ar1 in [0.45, 0.55]: %d / 100 runs\n", hits);
    report(2, "AR(1) estimator fidelity", ok);
    CHECK(ok);
}

TEST_CASE("criterion 3: null coverage reproduces the reference tables") {
    const int reps = 200;
    const TestSettings settings{.m = 100, .B = 1000, .seed = 0};

    std::vector<double> structural_cov(reps), spatial_cov(reps);
    parallel_for(reps, hw_workers(), [&](std::size_t r) {
        const PanelDataset ds = make_panel(20, 40, 30000 + r);
        TestSettings s = settings;
        s.seed = 40000 + r;
        structural_cov[r] = coverage_of(structural_change_test(ds, s));
        spatial_cov[r] = coverage_of(spatial_heterogeneity_test(ds, s));
    });

    double mean_structural = 0.0, mean_spatial = 0.0;
    for (int r = 0; r < reps; ++r) {
        mean_structural += structural_cov[r];
        mean_spatial += spatial_cov[r];
    }
    mean_structural /= reps;
    mean_spatial /= reps;

    const bool ok_structural = std::abs(mean_structural - 92.2) <= 4.0;
    const bool ok_spatial = std::abs(mean_spatial - 95.0) <= 4.0;
    std::printf("  null structural mean coverage %.2f (reference 92.2 +- 4)\n",
                mean_structural);
    std::printf("  null spatial mean coverage %.2f (reference 95.0 +- 4)\n",
                mean_spatial);
    report(3, "null size reproduction", ok_structural && ok_spatial);
    CHECK(ok_structural);
    CHECK(ok_spatial);
}

TEST_CASE("criterion 4a: structural directional power, paired seeds") {
    const int reps = 200;
    ChangeSpec cs;
    cs.proportion = 0.15;
    cs.position = ChangeSpec::Position::start;

    const PairedPowerResult res = paired_power(reps, [&](int r) {
        const std::uint64_t panel_seed = 50000 + r;
        TestSettings s{.m = 100, .B = 1000, .seed = 60000u + static_cast<unsigned>(r)};
        const double null_cov =
            coverage_of(structural_change_test(make_panel(20, 40, panel_seed), s));
        const double alt_cov = coverage_of(
            structural_change_test(make_panel(20, 40, panel_seed, cs), s));
        return std::make_pair(null_cov, alt_cov);
    });

    std::printf(
        "  structural paired power: null %.2f vs change %.2f, "
        "%d / %d pairs lower, sign-test p = %.4f\n",
        res.mean_null, res.mean_alt, res.wins, res.informative, res.p_value);
    const bool ok = res.p_value < 0.05;
    report(4, "structural directional power (4a)", ok);
    CHECK(ok);
}

TEST_CASE("criterion 4b: spatial directional power, paired seeds") {
    const int reps = 200;
    HeteroSpec hs;
    hs.proportion = 0.15;
    hs.n_neighborhoods_affected = 4;

    const PairedPowerResult res = paired_power(reps, [&](int r) {
        const std::uint64_t panel_seed = 70000 + r;
        TestSettings s{.B = 1000, .seed = 80000u + static_cast<unsigned>(r)};
        const double null_cov = coverage_of(
            spatial_heterogeneity_test(make_panel(40, 50, panel_seed), s));
        const double alt_cov = coverage_of(
            spatial_heterogeneity_test(make_panel(40, 50, panel_seed, {}, hs), s));
        return std::make_pair(null_cov, alt_cov);
    });

    std::printf(
        "  spatial paired power: null %.2f vs hetero %.2f, "
        "%d / %d pairs lower, sign-test p = %.4f\n",
        res.mean_null, res.mean_alt, res.wins, res.informative, res.p_value);
    const bool ok = res.p_value < 0.05;
    report(4, "spatial directional power (4b)", ok);
    CHECK(ok);
}

TEST_CASE("criterion 5: forward-search robustness under contamination") {
    const int reps = 200;
    std::vector<int> win(reps, 0);
    parallel_for(reps, hw_workers(), [&](std::size_t r) {
        std::mt19937_64 eng(90000 + r);
        std::normal_distribution<double> x1(100.0, 10.0), x2(50.0, 10.0);
        std::poisson_distribution<int> w_dist(6);
        std::normal_distribution<double> noise(0.0, 0.05);
        const int n = 40, n_out = 6;  // 15% gross outliers in a low-noise regime
        Eigen::MatrixXd design(n, 4);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            design(i, 0) = 1.0;
            design(i, 1) = x1(eng);
            design(i, 2) = x2(eng);
            design(i, 3) = static_cast<double>(w_dist(eng));
            const double delta = i < n_out ? 1.25 : 0.25;
            y(i) = 40.0 + 0.7 * design(i, 1) + 0.45 * design(i, 2) +
                   delta * design(i, 3) + noise(eng);
        }
        // tau calibrated to the noise level; the D jump scales with
        // (outlier shift / noise)^2
        const ForwardSearchTrace trace = forward_search(design, y, 20, 0.2, 1);
        const double robust_err = std::abs(trace.robust_fit.delta_hat(0) - 0.25);
        const double full_err = std::abs(trace.full_fit.delta_hat(0) - 0.25);
        win[r] = robust_err < full_err ? 1 : 0;
    });
    int wins = 0;
    for (int w : win) wins += w;
    const bool ok = wins >= reps * 90 / 100;
    std::printf("  robust beats full-sample delta in %d / %d cross-sections\n",
                wins, reps);
    report(5, "forward-search robustness", ok);
    CHECK(ok);
}

TEST_CASE("criterion 6: bit-identical across worker counts") {
    bool ok = true;
    const PanelDataset ds = make_panel(16, 40, 123);

    TestSettings one{.m = 40, .B = 400, .seed = 9};
    TestSettings many = one;
    many.n_workers = hw_workers();
    one.n_workers = 1;

    const TestOutcome sa = structural_change_test(ds, one);
    const TestOutcome sb = structural_change_test(ds, many);
    ok &= sa.ci.lower == sb.ci.lower && sa.ci.upper == sb.ci.upper &&
          sa.fraction_outside == sb.fraction_outside &&
          sa.per_item_outside == sb.per_item_outside;

    const TestOutcome pa = spatial_heterogeneity_test(ds, one);
    const TestOutcome pb = spatial_heterogeneity_test(ds, many);
    ok &= pa.ci.lower == pb.ci.lower && pa.ci.upper == pb.ci.upper &&
          pa.fraction_outside == pb.fraction_outside;

    const JointOutcome ja = joint_test(ds, one);
    const JointOutcome jb = joint_test(ds, many);
    ok &= ja.iterations == jb.iterations &&
          ja.structural.fraction_outside == jb.structural.fraction_outside &&
          ja.spatial.fraction_outside == jb.spatial.fraction_outside;

    ExperimentGrid grid;
    grid.kind = TestKind::structural;
    grid.n_units = {12};
    grid.n_times = {24};
    grid.proportions = {0.10};
    grid.positions = {ChangeSpec::Position::start};
    grid.replications = 4;
    grid.test.m = 15;
    grid.test.B = 150;
    grid.master_seed = 77;
    ExperimentGrid grid_many = grid;
    grid_many.n_workers = hw_workers();
    const auto ga = run_grid(grid);
    const auto gb = run_grid(grid_many);
    ok &= ga.size() == gb.size();
    for (std::size_t i = 0; ok && i < ga.size(); ++i) {
        ok &= ga[i].mean_coverage == gb[i].mean_coverage &&
              ga[i].rejection_rate == gb[i].rejection_rate;
        for (std::size_t r = 0; ok && r < ga[i].reps.size(); ++r)
            ok &= ga[i].reps[r].coverage == gb[i].reps[r].coverage &&
                  ga[i].reps[r].reject == gb[i].reps[r].reject;
    }

    report(6, "determinism across worker counts", ok);
    CHECK(ok);
}

TEST_CASE("criterion 7: module invariants") {
    bool ok = true;

    // OLS residual orthogonality and leverage sum.
    for (int r = 0; r < 20; ++r) {
        const int n = 30, k = 4;
        const Eigen::MatrixXd design = random_design(n, k, 7000 + r);
        const ModelFit fit = fit_ols(design, random_vector(n, 7100 + r));
        ok &= (design.transpose() * fit.residuals).cwiseAbs().maxCoeff() < 1e-8;
        ok &= std::abs(fit.leverage.sum() - k) < 1e-8;
    }

    // rho-hat scale invariance.
    const Eigen::VectorXd e = random_vector(200, 7200);
    const double base_rho = fit_ar1(e).rho_hat;
    for (double c : {1e-3, 7.0, 1e5})
        ok &= std::abs(fit_ar1((c * e).eval()).rho_hat - base_rho) < 1e-10;

    // BCI shift equivariance under a fixed seed.
    std::vector<double> values(300);
    std::mt19937_64 eng(7300);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (auto& v : values) v = dist(eng);
    std::vector<double> shifted = values;
    for (auto& v : shifted) v += 11.0;
    const BootstrapCI ba =
        percentile_bootstrap_ci(values, 150, 300, 0.05, StatKind::mean, 4);
    const BootstrapCI bb =
        percentile_bootstrap_ci(shifted, 150, 300, 0.05, StatKind::mean, 4);
    ok &= std::abs(bb.lower - ba.lower - 11.0) < 1e-10;
    ok &= std::abs(bb.upper - ba.upper - 11.0) < 1e-10;

    // Changed-block and affected-unit cardinalities.
    ChangeSpec cs;
    cs.proportion = 0.15;
    ok &= changed_time_block(cs, 50).size() == 8;
    HeteroSpec hs;
    hs.proportion = 0.15;
    hs.n_neighborhoods_affected = 4;
    ok &= heterogeneous_units(hs, assign_neighborhoods(40, 4)).size() == 6;

    // Paired-innovation identity: injections never alter the draws.
    DgpConfig cfg;
    cfg.n_units = 10;
    cfg.n_times = 30;
    cfg.master_seed = 7400;
    DgpConfig with_change = cfg;
    with_change.change_spec = cs;
    const GeneratedPanel a = generate(cfg);
    const GeneratedPanel b = generate(with_change);
    ok &= a.dataset.x[0] == b.dataset.x[0] && a.dataset.x[1] == b.dataset.x[1] &&
          a.dataset.w[0] == b.dataset.w[0];

    report(7, "module invariants", ok);
    CHECK(ok);
}
