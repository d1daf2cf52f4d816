#include "stpanel/report.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stpanel/experiment.hpp"

namespace stpanel {

using nlohmann::json;

json to_json(const BootstrapCI& ci) {
    return json{{"lower", ci.lower},
                {"upper", ci.upper},
                {"stat_lower", ci.stat_lower},
                {"stat_upper", ci.stat_upper},
                {"point_estimate", ci.point_estimate},
                {"mc_variance", ci.mc_variance},
                {"alpha", ci.alpha},
                {"stat_kind", to_string(ci.stat_kind)},
                {"B", ci.B},
                {"n", ci.n}};
}

json to_json(const TestSettings& settings) {
    return json{{"m", settings.m},
                {"B", settings.B},
                {"n", settings.n},
                {"l", settings.l},
                {"tau", settings.tau},
                {"alpha", settings.alpha},
                {"stat_kind", to_string(settings.stat_kind)},
                {"seed", settings.seed},
                {"n_workers", settings.n_workers}};
}

TestSettings test_settings_from_json(const json& j) {
    TestSettings s;
    s.m = j.value("m", s.m);
    s.B = j.value("B", s.B);
    s.n = j.value("n", s.n);
    s.l = j.value("l", s.l);
    s.tau = j.value("tau", s.tau);
    s.alpha = j.value("alpha", s.alpha);
    if (j.contains("stat_kind"))
        s.stat_kind = stat_kind_from_string(j["stat_kind"].get<std::string>());
    s.seed = j.value("seed", s.seed);
    s.n_workers = j.value("n_workers", s.n_workers);
    return s;
}

json to_json(const TestOutcome& outcome) {
    json coords = json::array();
    for (const auto& c : outcome.coordinates) {
        json items = json::array();
        for (bool b : c.outside) items.push_back(b);
        coords.push_back(json{{"ci", to_json(c.ci)},
                              {"fraction_outside", c.fraction_outside},
                              {"reject", c.reject},
                              {"outside", items}});
    }
    return json{{"test", outcome.test_name},
                {"decision", outcome.reject ? "reject" : "accept"},
                {"reject", outcome.reject},
                {"fraction_outside", outcome.fraction_outside},
                {"alpha", outcome.alpha},
                {"ci", to_json(outcome.ci)},
                {"n_statistics_checked", outcome.n_statistics_checked},
                {"coordinates", coords},
                {"settings", to_json(outcome.settings)},
                {"converged", outcome.converged},
                {"iterations", outcome.iterations}};
}

json to_json(const JointOutcome& outcome) {
    return json{{"structural", to_json(outcome.structural)},
                {"spatial", to_json(outcome.spatial)},
                {"converged", outcome.converged},
                {"iterations", outcome.iterations},
                {"last_change", outcome.last_change}};
}

json to_json(const GroundTruth& truth) {
    const DgpConfig& c = truth.config;
    json j{{"n_units", c.n_units},
           {"n_times", c.n_times},
           {"beta0", c.beta0},
           {"beta1", c.beta1},
           {"beta2", c.beta2},
           {"delta", c.delta},
           {"rho", c.rho},
           {"innovation_sd", c.innovation_sd},
           {"neighborhood_lambdas", c.neighborhood_lambdas},
           {"master_seed", c.master_seed},
           {"error_scale", truth.error_scale},
           {"changed_times", truth.changed_times},
           {"heterogeneous_units", truth.heterogeneous_units}};
    if (c.r2_target) j["r2_target"] = *c.r2_target;
    if (c.change_spec)
        j["change_spec"] = json{{"rho_prime", c.change_spec->rho_prime},
                                {"proportion", c.change_spec->proportion},
                                {"position", to_string(c.change_spec->position)}};
    if (c.hetero_spec)
        j["hetero_spec"] =
            json{{"delta_prime", c.hetero_spec->delta_prime},
                 {"proportion", c.hetero_spec->proportion},
                 {"n_neighborhoods_affected", c.hetero_spec->n_neighborhoods_affected}};
    return j;
}

std::string summarize(const TestOutcome& outcome) {
    std::ostringstream os;
    os << outcome.test_name << ": "
       << (outcome.reject ? "REJECT null" : "do not reject null") << "\n"
       << "  fraction outside BCI: " << outcome.fraction_outside
       << " (threshold alpha = " << outcome.alpha << ")\n"
       << "  BCI: [" << outcome.ci.lower << ", " << outcome.ci.upper << "]"
       << ", point estimate " << outcome.ci.point_estimate << ", MC variance "
       << outcome.ci.mc_variance << "\n"
       << "  statistics checked: " << outcome.n_statistics_checked << "\n";
    if (!outcome.converged) os << "  WARNING: backfitting did not converge\n";
    return os.str();
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path);
    out << j.dump(2) << "\n";
}

} // namespace stpanel
