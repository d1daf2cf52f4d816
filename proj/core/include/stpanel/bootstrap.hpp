#pragma once

#include <cstdint>
#include <vector>

#include "stpanel/errors.hpp"

namespace stpanel {

enum class StatKind { mean, median };

/// Percentile bootstrap interval for a scalar parameter.
///
/// Two percentile readings are kept side by side:
///  - [lower, upper]: empirical (alpha/2, 1-alpha/2) percentiles of the
///    pooled resampled values (n * B draws). This is the decision interval
///    used by the tests; it benchmarks individual estimates against the
///    resampled estimate distribution.
///  - [stat_lower, stat_upper]: the same percentiles of the B per-resample
///    statistics, which concentrate near the center as n grows.
/// point_estimate and mc_variance follow the per-resample statistics.
struct BootstrapCI {
    double lower = 0.0;
    double upper = 0.0;
    double stat_lower = 0.0;
    double stat_upper = 0.0;
    double point_estimate = 0.0;  // mean of the B statistics
    double mc_variance = 0.0;     // 1/(B-1) sum (stat_j - mean)^2
    double alpha = 0.05;
    StatKind stat_kind = StatKind::mean;
    int B = 0;  // resample count
    int n = 0;  // within-resample sample size
};

/// Type-7 (linear interpolation) quantile of a sample; sorts a copy.
double quantile(std::vector<double> values, double prob);

/// Ordinary bootstrap: B resamples of size n drawn with replacement from
/// `values`; per-resample mean or median; percentile interval as described
/// on BootstrapCI. Resample index patterns depend only on the seed, never
/// on the values. Requires 1 <= n < values.size() and B >= 100.
BootstrapCI percentile_bootstrap_ci(const std::vector<double>& values, int n, int B,
                                    double alpha, StatKind stat_kind,
                                    std::uint64_t seed);

const char* to_string(StatKind kind);
StatKind stat_kind_from_string(const std::string& s);

} // namespace stpanel
