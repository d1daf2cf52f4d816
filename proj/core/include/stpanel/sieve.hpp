#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "stpanel/ar1.hpp"
#include "stpanel/panel.hpp"

namespace stpanel {

/// Burn-in steps discarded before keeping a replicated series; the start
/// value is zero and initialization effects decay geometrically.
inline constexpr int kSieveBurnIn = 50;

/// Collection of AR(1) estimates from the sieve phase: one row per unit.
/// Rows hold only the successful replicates, so they may be shorter than m
/// when a replicate failed (failures are recorded per unit).
struct RhoMatrix {
    std::vector<std::vector<double>> estimates;  // N rows
    int m = 0;
    std::uint64_t master_seed = 0;
    std::vector<int> failures_per_unit;  // replicate failures, per unit

    std::size_t n_units() const { return estimates.size(); }
    std::size_t total() const {
        std::size_t s = 0;
        for (const auto& row : estimates) s += row.size();
        return s;
    }
    /// All entries concatenated row by row.
    std::vector<double> flatten() const;
};

/// Replicate a residual process by recursing the fitted AR(1) with
/// innovations drawn i.i.d. with replacement from the centered innovation
/// set. Returns `count` rows of length `length`. The stream for replicate k
/// is derived as derive_seed(seed, k), so output is schedule-independent.
std::vector<Eigen::VectorXd> sieve_replicate(const Eigen::VectorXd& innovations,
                                             double rho_hat, int length, int count,
                                             std::uint64_t seed);

struct SieveOptions {
    int m = 100;
    std::uint64_t master_seed = 0;
    bool include_w = true;  // drop the W columns from the per-unit regression
    int n_workers = 1;
};

/// Phase I of the structural-change test. For each unit: OLS of y_i on
/// [1, X_i, W_i], AR(1) on the residuals, m sieve replicates, pseudo-response
/// regeneration, re-fit, AR(1) on the new residuals. A replicate whose
/// re-fit residuals are numerically zero carries no new information and
/// reports the unit's own rho_hat (noiseless closure).
///
/// Throws UnestimableUnit when some unit yields zero successful replicates.
RhoMatrix collect_rho_estimates(const PanelDataset& dataset, const SieveOptions& opts);

} // namespace stpanel
