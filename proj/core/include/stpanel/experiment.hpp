#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "stpanel/dgp.hpp"
#include "stpanel/hypothesis.hpp"

namespace stpanel {

enum class TestKind { structural, spatial, joint };
const char* to_string(TestKind kind);
TestKind test_kind_from_string(const std::string& s);

const char* to_string(ChangeSpec::Position pos);
ChangeSpec::Position position_from_string(const std::string& s);

/// One cell of the simulation grid. proportion == 0 marks the null cell
/// (no injection); position applies to structural/joint cells,
/// n_neighborhoods to spatial/joint cells.
struct CellCoord {
    TestKind kind = TestKind::structural;
    int n_units = 20;
    int n_times = 40;
    double r2 = 0.95;  // <= 0 means no R^2 targeting
    double proportion = 0.0;
    ChangeSpec::Position position = ChangeSpec::Position::start;
    int n_neighborhoods = 4;

    bool is_null() const { return proportion <= 0.0; }
    /// Stable identifier used for checkpoint filenames and seed derivation.
    std::string key() const;
};

struct ReplicationRecord {
    int rep = 0;
    std::uint64_t seed = 0;
    double coverage = 0.0;  // 100 * (1 - fraction_outside)
    bool reject = false;
    // Joint runs carry the second component; NaN / false otherwise.
    double coverage2 = 0.0;
    bool reject2 = false;
};

struct CellResult {
    CellCoord coord;
    std::vector<ReplicationRecord> reps;
    int replications = 0;
    double mean_coverage = 0.0;
    double rejection_rate = 0.0;
    std::string error;  // nonempty when the cell failed

    void aggregate();
};

struct ExperimentGrid {
    TestKind kind = TestKind::structural;
    std::vector<int> n_units = {20};
    std::vector<int> n_times = {40};
    std::vector<double> r2_levels = {0.95};
    std::vector<double> proportions = {0.05, 0.10, 0.15};
    std::vector<ChangeSpec::Position> positions = {ChangeSpec::Position::start,
                                                   ChangeSpec::Position::middle,
                                                   ChangeSpec::Position::end};
    std::vector<int> neighborhood_counts = {1, 2, 3, 4};
    bool include_null = true;
    int replications = 200;
    TestSettings test;
    std::uint64_t master_seed = 0;
    std::string checkpoint_dir;  // empty disables checkpointing
    int n_workers = 1;

    std::vector<CellCoord> cells() const;
    void validate() const;

    static ExperimentGrid from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// DGP configuration for one replication of a cell.
DgpConfig make_dgp_config(const CellCoord& coord, std::uint64_t seed);

/// Per-replication seed; depends only on the master seed, the cell key, and
/// the replication index, so adding cells never perturbs existing ones.
std::uint64_t replication_seed(std::uint64_t master, const CellCoord& coord, int rep);

/// Runs every cell of the grid: generate, test, aggregate. Cell-level
/// failures are recorded on the CellResult, not thrown. Completed
/// replications are checkpointed (one JSON line each, append-only) and
/// reused on resume.
std::vector<CellResult> run_grid(const ExperimentGrid& grid);

enum class TableLayout { by_position, by_neighborhoods };

/// Aligned-text table mirroring the simulation-summary layout: a null row
/// plus one panel per proportion, rows by position / neighborhood count,
/// columns by (N, T). Throws IncompleteGrid when a layout cell is missing.
std::string emit_table(const std::vector<CellResult>& results, TableLayout layout);

/// One CSV row per cell (aggregates only).
void write_results_csv(const std::vector<CellResult>& results,
                       const std::string& path);
std::vector<CellResult> read_results_csv(const std::string& path);

} // namespace stpanel
