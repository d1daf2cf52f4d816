#include "stpanel/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "stpanel/rng.hpp"

namespace stpanel {

namespace {
constexpr int kErrorBurnIn = 50;

// Stream tags; one substream per quantity keeps the draws identical across
// injection settings.
constexpr std::uint64_t kTagX = 1, kTagW = 2, kTagEps = 3;
} // namespace

void DgpConfig::validate() const {
    if (n_units < 2 || n_times < 3) throw ConfigError("panel too small");
    if (!(std::abs(rho) < 1.0)) throw ConfigError("|rho| must be < 1");
    if (innovation_sd <= 0.0) throw ConfigError("innovation_sd must be positive");
    if (neighborhood_lambdas.empty()) throw ConfigError("need neighborhood lambdas");
    for (double l : neighborhood_lambdas)
        if (l <= 0.0) throw ConfigError("lambdas must be positive");
    if (r2_target && !(*r2_target > 0.0 && *r2_target < 1.0))
        throw ConfigError("r2_target must be in (0,1)");
    if (change_spec) {
        if (!(change_spec->proportion > 0.0 && change_spec->proportion < 1.0))
            throw ConfigError("change proportion must be in (0,1)");
        if (!(std::abs(change_spec->rho_prime) < 1.0))
            throw ConfigError("|rho_prime| must be < 1");
    }
    if (hetero_spec) {
        if (!(hetero_spec->proportion > 0.0 && hetero_spec->proportion < 1.0))
            throw ConfigError("hetero proportion must be in (0,1)");
        const int k = static_cast<int>(neighborhood_lambdas.size());
        if (hetero_spec->n_neighborhoods_affected < 1 ||
            hetero_spec->n_neighborhoods_affected > k)
            throw ConfigError("n_neighborhoods_affected must be in 1.." +
                              std::to_string(k));
    }
}

std::vector<int> assign_neighborhoods(int n_units, int k_neighborhoods) {
    std::vector<int> labels(n_units);
    const int base = n_units / k_neighborhoods;
    const int rem = n_units % k_neighborhoods;
    int unit = 0;
    for (int k = 0; k < k_neighborhoods; ++k) {
        const int size = base + (k < rem ? 1 : 0);
        for (int j = 0; j < size && unit < n_units; ++j) labels[unit++] = k + 1;
    }
    return labels;
}

std::vector<int> changed_time_block(const ChangeSpec& spec, int n_times) {
    const int len = static_cast<int>(std::ceil(spec.proportion * n_times));
    int first = 1;
    switch (spec.position) {
        case ChangeSpec::Position::start: first = 1; break;
        case ChangeSpec::Position::end: first = n_times - len + 1; break;
        case ChangeSpec::Position::middle: first = (n_times - len) / 2 + 1; break;
    }
    std::vector<int> block(len);
    for (int j = 0; j < len; ++j) block[j] = first + j;
    return block;
}

std::vector<int> heterogeneous_units(const HeteroSpec& spec,
                                     const std::vector<int>& neighborhood) {
    const int n = static_cast<int>(neighborhood.size());
    const int count = static_cast<int>(std::ceil(spec.proportion * n));

    // Units of each affected neighborhood, in index order.
    std::vector<std::vector<int>> members(spec.n_neighborhoods_affected);
    for (int i = 0; i < n; ++i) {
        const int k = neighborhood[i] - 1;
        if (k < spec.n_neighborhoods_affected) members[k].push_back(i);
    }

    std::vector<int> chosen;
    chosen.reserve(count);
    for (std::size_t round = 0; static_cast<int>(chosen.size()) < count; ++round) {
        bool any = false;
        for (auto& m : members) {
            if (round < m.size()) {
                chosen.push_back(m[round]);
                any = true;
                if (static_cast<int>(chosen.size()) == count) break;
            }
        }
        if (!any)
            throw ConfigError("affected neighborhoods have too few units");
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

double calibrate_r2(const DgpConfig& config) {
    if (!config.r2_target) return 1.0;
    const double r2 = *config.r2_target;

    // Pooled variance of W over an even neighborhood split: within-group
    // Poisson variance plus between-group mean dispersion.
    const auto labels =
        assign_neighborhoods(config.n_units,
                             static_cast<int>(config.neighborhood_lambdas.size()));
    double lam_mean = 0.0, lam_sq = 0.0;
    for (int i = 0; i < config.n_units; ++i) {
        const double lam = config.neighborhood_lambdas[labels[i] - 1];
        lam_mean += lam;
        lam_sq += lam * lam;
    }
    lam_mean /= config.n_units;
    lam_sq /= config.n_units;
    const double var_w = lam_mean + (lam_sq - lam_mean * lam_mean);

    const double var_x = config.x_sd * config.x_sd;
    const double v_sys = config.beta1 * config.beta1 * var_x +
                         config.beta2 * config.beta2 * var_x +
                         config.delta * config.delta * var_w;

    const double target_err_var = v_sys * (1.0 - r2) / r2;
    const double base_var = config.innovation_sd * config.innovation_sd /
                            (1.0 - config.rho * config.rho);
    return std::sqrt(target_err_var / base_var);
}

GeneratedPanel generate(const DgpConfig& config) {
    config.validate();
    const int n = config.n_units, t_count = config.n_times;
    const int k_nbhd = static_cast<int>(config.neighborhood_lambdas.size());

    GeneratedPanel out;
    out.truth.config = config;
    out.truth.error_scale = calibrate_r2(config);

    PanelDataset& ds = out.dataset;
    ds.n_units = n;
    ds.n_times = t_count;
    ds.neighborhood = assign_neighborhoods(n, k_nbhd);
    ds.x.assign(2, Eigen::MatrixXd(n, t_count));
    ds.w.assign(1, Eigen::MatrixXd(n, t_count));
    ds.y.resize(n, t_count);

    // Covariates.
    {
        Engine eng = make_engine(derive_seed(config.master_seed, kTagX));
        std::normal_distribution<double> n1(config.x1_mean, config.x_sd);
        std::normal_distribution<double> n2(config.x2_mean, config.x_sd);
        for (int i = 0; i < n; ++i)
            for (int t = 0; t < t_count; ++t) {
                ds.x[0](i, t) = n1(eng);
                ds.x[1](i, t) = n2(eng);
            }
    }

    // Neighborhood variable.
    {
        Engine eng = make_engine(derive_seed(config.master_seed, kTagW));
        for (int i = 0; i < n; ++i) {
            std::poisson_distribution<int> pois(
                config.neighborhood_lambdas[ds.neighborhood[i] - 1]);
            for (int t = 0; t < t_count; ++t) ds.w[0](i, t) = pois(eng);
        }
    }

    // Injection bookkeeping.
    std::vector<char> in_block(t_count + 1, 0);
    if (config.change_spec) {
        out.truth.changed_times = changed_time_block(*config.change_spec, t_count);
        for (int t : out.truth.changed_times) in_block[t] = 1;
    }
    std::vector<char> hetero(n, 0);
    if (config.hetero_spec) {
        out.truth.heterogeneous_units =
            heterogeneous_units(*config.hetero_spec, ds.neighborhood);
        for (int i : out.truth.heterogeneous_units) hetero[i] = 1;
    }

    // AR(1) errors: the innovation draws never depend on the injections,
    // only the rho applied inside the changed block does.
    const double scale = out.truth.error_scale * config.innovation_sd;
    Eigen::MatrixXd eps(n, t_count);
    for (int i = 0; i < n; ++i) {
        Engine eng = make_engine(
            derive_seed(config.master_seed, kTagEps, static_cast<std::uint64_t>(i)));
        std::normal_distribution<double> innov(0.0, 1.0);
        double e = 0.0;
        for (int b = 0; b < kErrorBurnIn; ++b) e = config.rho * e + scale * innov(eng);
        for (int t = 1; t <= t_count; ++t) {
            const double rho_t = (config.change_spec && in_block[t])
                                     ? config.change_spec->rho_prime
                                     : config.rho;
            e = rho_t * e + scale * innov(eng);
            eps(i, t - 1) = e;
        }
    }

    for (int i = 0; i < n; ++i) {
        const double delta_i =
            hetero[i] ? config.hetero_spec->delta_prime : config.delta;
        for (int t = 0; t < t_count; ++t) {
            ds.y(i, t) = config.beta0 + config.beta1 * ds.x[0](i, t) +
                         config.beta2 * ds.x[1](i, t) + delta_i * ds.w[0](i, t) +
                         eps(i, t);
        }
    }

    ds.validate();
    return out;
}

} // namespace stpanel
