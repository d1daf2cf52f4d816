#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stpanel/bootstrap.hpp"
#include "stpanel/forward_search.hpp"
#include "stpanel/panel.hpp"
#include "stpanel/sieve.hpp"

namespace stpanel {

/// Tuning knobs shared by the test operations. Zero means "derive the
/// default": n = ceil(pool/2), l = ceil(N/2).
struct TestSettings {
    int m = 100;        // sieve replicates per unit
    int B = 1000;       // ordinary-bootstrap resamples
    int n = 0;          // within-resample size
    int l = 0;          // forward-search initial subset size
    double tau = kDefaultTau;
    double alpha = 0.05;
    StatKind stat_kind = StatKind::mean;
    std::uint64_t seed = 0;
    int n_workers = 1;
};

/// Per-coordinate decision detail (spatial test with vector W; the
/// structural test always has exactly one coordinate).
struct CoordinateOutcome {
    BootstrapCI ci;
    std::vector<bool> outside;
    double fraction_outside = 0.0;
    bool reject = false;
};

struct TestOutcome {
    std::string test_name;
    bool reject = false;
    double fraction_outside = 0.0;  // driving coordinate (max over coordinates)
    double alpha = 0.05;
    BootstrapCI ci;                      // driving coordinate's interval
    std::size_t n_statistics_checked = 0;
    std::vector<bool> per_item_outside;  // driving coordinate
    std::vector<CoordinateOutcome> coordinates;
    TestSettings settings;  // provenance
    bool converged = true;  // joint test only
    int iterations = 1;     // joint test only
};

/// Phase II decision applied to a pool of estimates: build the BCI from
/// `ci_source`, count how many of `compared` fall outside, reject when the
/// outside fraction reaches alpha (ties reject; accept/reject exhaustive).
CoordinateOutcome decide(const std::vector<double>& ci_source,
                         const std::vector<double>& compared, int n, int B,
                         double alpha, StatKind stat_kind, std::uint64_t seed);

/// AR-sieve test for temporary structural change: Phase I yields N*m rho
/// estimates, Phase II benchmarks them against their own bootstrap interval.
TestOutcome structural_change_test(const PanelDataset& dataset,
                                   const TestSettings& settings);

/// Forward-search test for spatial heterogeneity: the T robust delta
/// estimates feed the interval, the T full-sample estimates are judged
/// against it. Vector W is handled coordinate-wise; any coordinate
/// rejecting rejects overall.
TestOutcome spatial_heterogeneity_test(const PanelDataset& dataset,
                                       const TestSettings& settings);

struct JointOutcome {
    TestOutcome structural;
    TestOutcome spatial;
    bool converged = false;
    int iterations = 0;
    double last_change = 0.0;
};

/// Backfitting-style joint procedure: alternate (a) forward search on the
/// AR(1) quasi-differenced panel with (b) per-unit AR estimation on the
/// partial residuals y - W * delta_robust, until the largest parameter
/// change drops below converge_tol or max_iter is reached; then run both
/// Phase II decisions on the converged components. Non-convergence is
/// flagged, not fatal.
JointOutcome joint_test(const PanelDataset& dataset, const TestSettings& settings,
                        int max_iter = 20, double converge_tol = 1e-4);

} // namespace stpanel
