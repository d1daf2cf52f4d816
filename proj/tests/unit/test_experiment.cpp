#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "stpanel/experiment.hpp"

using namespace stpanel;

namespace {

ExperimentGrid tiny_grid(const std::string& checkpoint_dir = "") {
    ExperimentGrid grid;
    grid.kind = TestKind::spatial;
    grid.n_units = {12};
    grid.n_times = {20};
    grid.r2_levels = {0.95};
    grid.proportions = {0.15};
    grid.neighborhood_counts = {2};
    grid.include_null = true;
    grid.replications = 3;
    grid.test.m = 10;
    grid.test.B = 150;
    grid.test.seed = 0;
    grid.master_seed = 42;
    grid.checkpoint_dir = checkpoint_dir;
    return grid;
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name)
        : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace

TEST_CASE("cell enumeration covers the axes plus one null cell") {
    ExperimentGrid grid;
    grid.kind = TestKind::structural;
    grid.n_units = {20, 40};
    grid.n_times = {40};
    grid.r2_levels = {0.95};
    grid.proportions = {0.05, 0.10};
    grid.positions = {ChangeSpec::Position::start, ChangeSpec::Position::end};
    const auto cells = grid.cells();
    // 2 null cells (one per N) + 2*1*1*2*2 injected
    int nulls = 0;
    for (const auto& c : cells) nulls += c.is_null();
    CHECK(nulls == 2);
    CHECK(cells.size() == 2 + 8);

    grid.include_null = false;
    CHECK(grid.cells().size() == 8);
}

TEST_CASE("replication seeds are stable against grid growth") {
    CellCoord coord;
    coord.kind = TestKind::structural;
    coord.n_units = 20;
    coord.n_times = 40;
    coord.proportion = 0.10;
    const std::uint64_t s = replication_seed(7, coord, 3);
    CHECK(replication_seed(7, coord, 3) == s);
    CHECK(replication_seed(7, coord, 4) != s);
    CHECK(replication_seed(8, coord, 3) != s);
    CellCoord other = coord;
    other.n_times = 50;
    CHECK(replication_seed(7, other, 3) != s);
}

TEST_CASE("aggregation reproduces hand-computed summaries") {
    CellResult cell;
    cell.reps = {{0, 1, 90.0, true, 0.0, false},
                 {1, 2, 96.0, false, 0.0, false},
                 {2, 3, 93.0, false, 0.0, false},
                 {3, 4, 89.0, true, 0.0, false}};
    cell.aggregate();
    CHECK(cell.replications == 4);
    CHECK(cell.mean_coverage == doctest::Approx(92.0));
    CHECK(cell.rejection_rate == doctest::Approx(0.5));
}

TEST_CASE("run_grid is deterministic across worker counts") {
    ExperimentGrid a = tiny_grid();
    ExperimentGrid b = tiny_grid();
    b.n_workers = 5;
    const auto ra = run_grid(a);
    const auto rb = run_grid(b);
    REQUIRE(ra.size() == rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) {
        CHECK(ra[i].error.empty());
        CHECK(ra[i].mean_coverage == rb[i].mean_coverage);
        CHECK(ra[i].rejection_rate == rb[i].rejection_rate);
        REQUIRE(ra[i].reps.size() == rb[i].reps.size());
        for (std::size_t r = 0; r < ra[i].reps.size(); ++r) {
            CHECK(ra[i].reps[r].seed == rb[i].reps[r].seed);
            CHECK(ra[i].reps[r].coverage == rb[i].reps[r].coverage);
        }
    }
}

TEST_CASE("checkpoints resume without recomputing or drifting") {
    TempDir dir("stpanel-ckpt-test");
    ExperimentGrid grid = tiny_grid(dir.path.string());
    const auto first = run_grid(grid);

    // Checkpoint files exist, one JSON line per replication.
    int lines = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir.path)) {
        std::ifstream in(entry.path());
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) ++lines;
    }
    CHECK(lines == 2 * 3);  // two cells, three replications each

    // A resumed run reads everything back and matches bit for bit.
    const auto second = run_grid(grid);
    REQUIRE(second.size() == first.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(second[i].mean_coverage == first[i].mean_coverage);
        CHECK(second[i].rejection_rate == first[i].rejection_rate);
        for (std::size_t r = 0; r < first[i].reps.size(); ++r)
            CHECK(second[i].reps[r].coverage == first[i].reps[r].coverage);
    }
}

TEST_CASE("results CSV round-trips the aggregates exactly") {
    TempDir dir("stpanel-csv-test");
    const auto results = run_grid(tiny_grid());
    const std::string path = (dir.path / "results.csv").string();
    write_results_csv(results, path);
    const auto loaded = read_results_csv(path);
    REQUIRE(loaded.size() == results.size());
    for (std::size_t i = 0; i < results.size(); ++i) {
        CHECK(loaded[i].coord.key() == results[i].coord.key());
        CHECK(loaded[i].replications == results[i].replications);
        CHECK(loaded[i].mean_coverage == results[i].mean_coverage);
        CHECK(loaded[i].rejection_rate == results[i].rejection_rate);
    }
}

TEST_CASE("emit_table lays out the null row and proportion panels") {
    const auto results = run_grid(tiny_grid());
    const std::string table = emit_table(results, TableLayout::by_neighborhoods);
    CHECK(table.find("No Spatial Heterogeneity") != std::string::npos);
    CHECK(table.find("Proportion = 15%") != std::string::npos);
    CHECK(table.find("2 Neighborhoods") != std::string::npos);
    CHECK(table.find("N=12,T=20") != std::string::npos);

    // an extra (N, T) column with no matching cells makes the layout incomplete
    std::vector<CellResult> partial = results;
    partial.push_back(results.back());
    partial.back().coord.n_units = 24;
    CHECK_THROWS_AS(emit_table(partial, TableLayout::by_neighborhoods),
                    IncompleteGrid);
}

TEST_CASE("grid JSON round trip") {
    ExperimentGrid grid = tiny_grid();
    grid.positions = {ChangeSpec::Position::middle};
    const auto j = grid.to_json();
    const ExperimentGrid back = ExperimentGrid::from_json(j);
    CHECK(back.kind == grid.kind);
    CHECK(back.n_units == grid.n_units);
    CHECK(back.proportions == grid.proportions);
    CHECK(back.replications == grid.replications);
    CHECK(back.master_seed == grid.master_seed);
    CHECK(back.test.m == grid.test.m);
    CHECK(back.test.B == grid.test.B);
    CHECK(back.positions == grid.positions);
}
