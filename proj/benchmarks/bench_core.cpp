#include <benchmark/benchmark.h>

#include <random>

#include "stpanel/ar1.hpp"
#include "stpanel/dgp.hpp"
#include "stpanel/forward_search.hpp"
#include "stpanel/hypothesis.hpp"
#include "stpanel/ols.hpp"
#include "stpanel/sieve.hpp"

using namespace stpanel;

namespace {

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

PanelDataset null_panel(int n, int t) {
    DgpConfig cfg;
    cfg.n_units = n;
    cfg.n_times = t;
    cfg.r2_target = 0.95;
    cfg.master_seed = 1;
    return generate(cfg).dataset;
}

void bm_fit_ols(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Eigen::MatrixXd design = random_design(n, 4, 1);
    const Eigen::VectorXd y = random_vector(n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(fit_ols(design, y));
}
BENCHMARK(bm_fit_ols)->Arg(40)->Arg(75)->Arg(500);

void bm_fit_ar1(benchmark::State& state) {
    const Eigen::VectorXd e = random_vector(static_cast<int>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(fit_ar1(e));
}
BENCHMARK(bm_fit_ar1)->Arg(40)->Arg(5000);

void bm_collect_rho_estimates(benchmark::State& state) {
    const PanelDataset ds = null_panel(20, 40);
    SieveOptions opts;
    opts.m = static_cast<int>(state.range(0));
    opts.master_seed = 4;
    for (auto _ : state) benchmark::DoNotOptimize(collect_rho_estimates(ds, opts));
}
BENCHMARK(bm_collect_rho_estimates)->Arg(20)->Arg(100);

void bm_forward_search(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Eigen::MatrixXd design = random_design(n, 4, 5);
    const Eigen::VectorXd y = random_vector(n, 6);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            forward_search(design, y, default_subset_size(n), kDefaultTau, 1));
}
BENCHMARK(bm_forward_search)->Arg(20)->Arg(60);

void bm_structural_test(benchmark::State& state) {
    const PanelDataset ds = null_panel(20, 40);
    TestSettings settings;
    settings.m = 50;
    settings.B = 500;
    settings.seed = 7;
    for (auto _ : state)
        benchmark::DoNotOptimize(structural_change_test(ds, settings));
}
BENCHMARK(bm_structural_test);

} // namespace
