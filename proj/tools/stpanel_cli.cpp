// Command-line surface: simulate panels, run the structural-change /
// spatial-heterogeneity / joint tests on CSV panels, or drive a full
// simulation grid. Reports are JSON; exit code 0 means the run completed
// (the accept/reject decision lives in the report, not the exit code).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "stpanel/csv.hpp"
#include "stpanel/dgp.hpp"
#include "stpanel/experiment.hpp"
#include "stpanel/hypothesis.hpp"
#include "stpanel/report.hpp"

using namespace stpanel;
using nlohmann::json;

namespace {

struct CommonTestFlags {
    std::string input;
    std::string report_path;
    TestSettings settings;

    void add_to(CLI::App* cmd, bool needs_sieve, bool needs_search) {
        cmd->add_option("-i,--input", input, "Input panel CSV (long format)")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("-o,--report", report_path, "Write JSON report here");
        cmd->add_option("--alpha", settings.alpha, "Decision threshold")
            ->check(CLI::Range(1e-6, 0.999999));
        cmd->add_option("-B,--resamples", settings.B, "Bootstrap resample count");
        cmd->add_option("-n,--subsample", settings.n,
                        "Within-resample size (0 = half the pool)");
        cmd->add_option("--seed", settings.seed, "Master seed");
        cmd->add_option("--workers", settings.n_workers, "Worker threads");
        std::string stat = "mean";
        cmd->add_option_function<std::string>(
               "--stat",
               [this](const std::string& s) {
                   settings.stat_kind = stat_kind_from_string(s);
               },
               "Resample statistic: mean or median")
            ->check(CLI::IsMember({"mean", "median"}));
        if (needs_sieve)
            cmd->add_option("-m,--replicates", settings.m,
                            "Sieve replicates per unit");
        if (needs_search) {
            cmd->add_option("-l,--initial-subset", settings.l,
                            "Forward-search initial subset size (0 = ceil(N/2))");
            cmd->add_option("--tau", settings.tau,
                            "Cook's D jump tolerance for the stopping rule");
        }
    }
};

void emit_report(const json& report, const std::string& path) {
    if (!path.empty()) {
        write_json_file(report, path);
        std::cout << "report written to " << path << "\n";
    } else {
        std::cout << report.dump(2) << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonparametric tests for temporary structural change and "
                 "spatial heterogeneity in spatio-temporal panels"};
    app.require_subcommand(1);

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "Generate a synthetic panel CSV");
    DgpConfig dgp;
    std::string sim_out = "panel.csv", sim_truth;
    std::string change_pos = "start";
    std::optional<double> change_prop, hetero_prop, r2;
    int hetero_nbhd = 4;
    double rho_prime = 0.75, delta_prime = 1.25;
    sim->add_option("-o,--output", sim_out, "Output CSV path");
    sim->add_option("--truth", sim_truth, "Write ground-truth JSON here");
    sim->add_option("-N,--units", dgp.n_units, "Number of spatial units");
    sim->add_option("-T,--times", dgp.n_times, "Number of time points");
    sim->add_option("--rho", dgp.rho, "AR(1) parameter");
    sim->add_option("--delta", dgp.delta, "Spatial parameter");
    sim->add_option("--r2", r2, "Target coefficient of determination");
    sim->add_option("--seed", dgp.master_seed, "Master seed");
    sim->add_option("--change-proportion", change_prop,
                    "Inject temporary structural change over this fraction of T");
    sim->add_option("--change-position", change_pos, "start|middle|end")
        ->check(CLI::IsMember({"start", "middle", "end"}));
    sim->add_option("--rho-prime", rho_prime, "Temporary AR(1) value");
    sim->add_option("--hetero-proportion", hetero_prop,
                    "Inject spatial heterogeneity in this fraction of units");
    sim->add_option("--hetero-neighborhoods", hetero_nbhd,
                    "Neighborhoods carrying the heterogeneity (1..4)");
    sim->add_option("--delta-prime", delta_prime, "Heterogeneous delta value");

    // ---- tests ----
    auto* ts = app.add_subcommand("test-structural",
                                  "AR-sieve bootstrap test for temporary "
                                  "structural change");
    CommonTestFlags ts_flags;
    ts_flags.add_to(ts, true, false);

    auto* sp = app.add_subcommand("test-spatial",
                                  "Forward-search test for spatial heterogeneity");
    CommonTestFlags sp_flags;
    sp_flags.add_to(sp, false, true);

    auto* jt = app.add_subcommand("test-joint",
                                  "Backfitting joint test for both aberrations");
    CommonTestFlags jt_flags;
    jt_flags.add_to(jt, true, true);
    int max_iter = 20;
    double converge_tol = 1e-4;
    jt->add_option("--max-iter", max_iter, "Backfitting iteration cap");
    jt->add_option("--converge-tol", converge_tol, "Backfitting convergence tolerance");

    // ---- experiment ----
    auto* ex = app.add_subcommand("experiment", "Run a simulation grid");
    std::string grid_config, out_dir = "experiment-out";
    std::string ex_kind;
    ex->add_option("-c,--config", grid_config, "Grid configuration JSON")
        ->required()
        ->check(CLI::ExistingFile);
    ex->add_option("-o,--out", out_dir, "Output directory");
    ex->add_option("--kind", ex_kind, "Override test kind")
        ->check(CLI::IsMember({"structural", "spatial", "joint"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            if (r2) dgp.r2_target = r2;
            if (change_prop) {
                ChangeSpec cs;
                cs.proportion = *change_prop;
                cs.position = position_from_string(change_pos);
                cs.rho_prime = rho_prime;
                dgp.change_spec = cs;
            }
            if (hetero_prop) {
                HeteroSpec hs;
                hs.proportion = *hetero_prop;
                hs.n_neighborhoods_affected = hetero_nbhd;
                hs.delta_prime = delta_prime;
                dgp.hetero_spec = hs;
            }
            const GeneratedPanel panel = generate(dgp);
            write_panel_csv(panel.dataset, sim_out);
            std::cout << "panel written to " << sim_out << " (N=" << dgp.n_units
                      << ", T=" << dgp.n_times << ")\n";
            if (!sim_truth.empty()) {
                write_json_file(to_json(panel.truth), sim_truth);
                std::cout << "ground truth written to " << sim_truth << "\n";
            }
        } else if (*ts) {
            const PanelDataset ds = load_panel_csv(ts_flags.input);
            const TestOutcome out = structural_change_test(ds, ts_flags.settings);
            std::cout << summarize(out);
            emit_report(to_json(out), ts_flags.report_path);
        } else if (*sp) {
            const PanelDataset ds = load_panel_csv(sp_flags.input);
            const TestOutcome out = spatial_heterogeneity_test(ds, sp_flags.settings);
            std::cout << summarize(out);
            emit_report(to_json(out), sp_flags.report_path);
        } else if (*jt) {
            const PanelDataset ds = load_panel_csv(jt_flags.input);
            const JointOutcome out =
                joint_test(ds, jt_flags.settings, max_iter, converge_tol);
            std::cout << summarize(out.structural) << summarize(out.spatial);
            emit_report(to_json(out), jt_flags.report_path);
        } else if (*ex) {
            std::ifstream in(grid_config);
            json j = json::parse(in);
            ExperimentGrid grid = ExperimentGrid::from_json(j);
            if (!ex_kind.empty()) grid.kind = test_kind_from_string(ex_kind);
            std::filesystem::create_directories(out_dir);
            if (grid.checkpoint_dir.empty())
                grid.checkpoint_dir = out_dir + "/checkpoints";
            const auto results = run_grid(grid);

            write_results_csv(results, out_dir + "/results.csv");
            const auto layout = grid.kind == TestKind::spatial
                                    ? TableLayout::by_neighborhoods
                                    : TableLayout::by_position;
            const std::string table = emit_table(results, layout);
            std::ofstream tbl(out_dir + "/table.txt");
            tbl << table;
            std::cout << table;

            json summary{{"grid", grid.to_json()}, {"cells", json::array()}};
            for (const auto& r : results)
                summary["cells"].push_back(json{{"key", r.coord.key()},
                                                {"replications", r.replications},
                                                {"mean_coverage", r.mean_coverage},
                                                {"rejection_rate", r.rejection_rate},
                                                {"error", r.error}});
            write_json_file(summary, out_dir + "/summary.json");
            std::cout << "results in " << out_dir << "\n";
            for (const auto& r : results)
                if (!r.error.empty())
                    std::cerr << "cell " << r.coord.key() << " failed: " << r.error
                              << "\n";
        }
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
