#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stpanel/panel.hpp"

namespace stpanel {

/// Temporary change of the temporal parameter over a contiguous time block.
struct ChangeSpec {
    double rho_prime = 0.75;
    double proportion = 0.10;  // fraction of time points affected
    enum class Position { start, middle, end } position = Position::start;
};

/// Changed spatial parameter for a subset of units, spread round-robin over
/// the first `n_neighborhoods_affected` neighborhoods.
struct HeteroSpec {
    double delta_prime = 1.25;
    double proportion = 0.10;  // fraction of units affected
    int n_neighborhoods_affected = 4;
};

struct DgpConfig {
    int n_units = 20;
    int n_times = 40;
    double beta0 = 40.00;
    double beta1 = 0.70;
    double beta2 = 0.45;
    double delta = 0.25;
    double rho = 0.5;
    double innovation_sd = 2.0;  // variance 4
    std::vector<double> neighborhood_lambdas = {2.0, 4.0, 6.0, 10.0};
    // Covariate populations: X1 ~ N(100, 100), X2 ~ N(50, 100).
    double x1_mean = 100.0, x2_mean = 50.0, x_sd = 10.0;
    std::optional<double> r2_target;  // scales the innovations when set
    std::optional<ChangeSpec> change_spec;
    std::optional<HeteroSpec> hetero_spec;
    std::uint64_t master_seed = 0;

    void validate() const;
};

struct GroundTruth {
    DgpConfig config;
    std::vector<int> changed_times;      // T^c, 1-based, empty when no change
    std::vector<int> heterogeneous_units;  // N^h, 0-based unit indices
    double error_scale = 1.0;            // c applied to every innovation
};

struct GeneratedPanel {
    PanelDataset dataset;
    GroundTruth truth;
};

/// Error scale c for a target R^2: the systematic-component variance is
/// computed analytically from the configured coefficients and covariate /
/// W populations, and c solves  c^2 * sigma_a^2 / (1 - rho^2)
///   = V_sys * (1 - R^2) / R^2.
double calibrate_r2(const DgpConfig& config);

/// Contiguous changed-time block, 1-based, of length ceil(proportion * T).
/// Middle placement is centered at offset floor((T - k) / 2).
std::vector<int> changed_time_block(const ChangeSpec& spec, int n_times);

/// Affected units: ceil(proportion * N) of them, taken round-robin from the
/// start of each affected neighborhood.
std::vector<int> heterogeneous_units(const HeteroSpec& spec,
                                     const std::vector<int>& neighborhood);

/// Even split of N units into K neighborhoods, remainder to the
/// lowest-index neighborhoods; labels 1..K assigned in unit order.
std::vector<int> assign_neighborhoods(int n_units, int k_neighborhoods);

/// Generate one synthetic panel. The X, W, and innovation draws depend only
/// on (config minus change_spec/hetero_spec, seed): injections alter which
/// rho / delta applies, never the draws, so paired null/alternative datasets
/// share identical randomness.
GeneratedPanel generate(const DgpConfig& config);

} // namespace stpanel
