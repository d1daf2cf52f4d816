#include "stpanel/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "stpanel/rng.hpp"

namespace stpanel {

double quantile(std::vector<double> values, double prob) {
    if (values.empty()) throw ConfigError("quantile of empty sample");
    std::sort(values.begin(), values.end());
    const double h = prob * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = static_cast<std::size_t>(std::ceil(h));
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

double median_inplace(std::vector<double>& v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    double lo = *std::max_element(v.begin(), v.begin() + mid);
    return 0.5 * (lo + hi);
}

} // namespace

BootstrapCI percentile_bootstrap_ci(const std::vector<double>& values, int n, int B,
                                    double alpha, StatKind stat_kind,
                                    std::uint64_t seed) {
    const auto len = values.size();
    if (n < 1 || static_cast<std::size_t>(n) >= len)
        throw ConfigError("subsample size n must satisfy 1 <= n < " +
                          std::to_string(len));
    if (B < 100) throw ConfigError("resample count B must be >= 100");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in (0,1)");

    std::vector<double> stats(B);
    std::vector<double> pooled;
    pooled.reserve(static_cast<std::size_t>(n) * B);
    std::vector<double> draw(n);

    for (int j = 0; j < B; ++j) {
        Engine eng = make_engine(derive_seed(seed, static_cast<std::uint64_t>(j)));
        std::uniform_int_distribution<std::size_t> pick(0, len - 1);
        for (int r = 0; r < n; ++r) draw[r] = values[pick(eng)];
        pooled.insert(pooled.end(), draw.begin(), draw.end());
        if (stat_kind == StatKind::mean) {
            double s = 0.0;
            for (double v : draw) s += v;
            stats[j] = s / n;
        } else {
            stats[j] = median_inplace(draw);
        }
    }

    BootstrapCI ci;
    ci.alpha = alpha;
    ci.stat_kind = stat_kind;
    ci.B = B;
    ci.n = n;
    ci.lower = quantile(pooled, alpha / 2.0);
    ci.upper = quantile(pooled, 1.0 - alpha / 2.0);
    ci.stat_lower = quantile(stats, alpha / 2.0);
    ci.stat_upper = quantile(stats, 1.0 - alpha / 2.0);

    double mean = 0.0;
    for (double s : stats) mean += s;
    mean /= B;
    ci.point_estimate = mean;
    double ss = 0.0;
    for (double s : stats) ss += (s - mean) * (s - mean);
    ci.mc_variance = ss / (B - 1);
    return ci;
}

const char* to_string(StatKind kind) {
    return kind == StatKind::mean ? "mean" : "median";
}

StatKind stat_kind_from_string(const std::string& s) {
    if (s == "mean") return StatKind::mean;
    if (s == "median") return StatKind::median;
    throw ConfigError("unknown statistic kind: " + s);
}

} // namespace stpanel
