#include "stpanel/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stpanel/parallel.hpp"
#include "stpanel/rng.hpp"

namespace stpanel {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(TestKind kind) {
    switch (kind) {
        case TestKind::structural: return "structural";
        case TestKind::spatial: return "spatial";
        case TestKind::joint: return "joint";
    }
    return "?";
}

TestKind test_kind_from_string(const std::string& s) {
    if (s == "structural") return TestKind::structural;
    if (s == "spatial") return TestKind::spatial;
    if (s == "joint") return TestKind::joint;
    throw ConfigError("unknown test kind: " + s);
}

const char* to_string(ChangeSpec::Position pos) {
    switch (pos) {
        case ChangeSpec::Position::start: return "start";
        case ChangeSpec::Position::middle: return "middle";
        case ChangeSpec::Position::end: return "end";
    }
    return "?";
}

ChangeSpec::Position position_from_string(const std::string& s) {
    if (s == "start") return ChangeSpec::Position::start;
    if (s == "middle") return ChangeSpec::Position::middle;
    if (s == "end") return ChangeSpec::Position::end;
    throw ConfigError("unknown position: " + s);
}

std::string CellCoord::key() const {
    std::ostringstream os;
    os << to_string(kind) << "_N" << n_units << "_T" << n_times;
    if (r2 > 0.0) os << "_r2-" << std::setprecision(4) << r2;
    if (is_null()) {
        os << "_null";
    } else {
        os << "_p" << std::setprecision(4) << proportion;
        if (kind != TestKind::spatial) os << "_" << to_string(position);
        if (kind != TestKind::structural) os << "_nb" << n_neighborhoods;
    }
    return os.str();
}

void CellResult::aggregate() {
    replications = static_cast<int>(reps.size());
    if (reps.empty()) return;
    double cov = 0.0;
    int rej = 0;
    for (const auto& r : reps) {
        cov += r.coverage;
        if (r.reject || (coord.kind == TestKind::joint && r.reject2)) ++rej;
    }
    mean_coverage = cov / replications;
    rejection_rate = static_cast<double>(rej) / replications;
}

void ExperimentGrid::validate() const {
    if (n_units.empty() || n_times.empty()) throw ConfigError("empty grid axes");
    if (replications < 1) throw ConfigError("replications must be >= 1");
    if (!include_null && proportions.empty())
        throw ConfigError("grid has no cells");
}

std::vector<CellCoord> ExperimentGrid::cells() const {
    validate();
    std::vector<CellCoord> out;
    const std::vector<double> r2s = r2_levels.empty() ? std::vector<double>{-1.0}
                                                      : r2_levels;
    for (int n : n_units)
        for (int t : n_times)
            for (double r2 : r2s) {
                CellCoord base;
                base.kind = kind;
                base.n_units = n;
                base.n_times = t;
                base.r2 = r2;
                if (include_null) {
                    CellCoord c = base;
                    c.proportion = 0.0;
                    out.push_back(c);
                }
                for (double prop : proportions) {
                    if (kind == TestKind::structural) {
                        for (auto pos : positions) {
                            CellCoord c = base;
                            c.proportion = prop;
                            c.position = pos;
                            out.push_back(c);
                        }
                    } else if (kind == TestKind::spatial) {
                        for (int nb : neighborhood_counts) {
                            CellCoord c = base;
                            c.proportion = prop;
                            c.n_neighborhoods = nb;
                            out.push_back(c);
                        }
                    } else {
                        for (auto pos : positions)
                            for (int nb : neighborhood_counts) {
                                CellCoord c = base;
                                c.proportion = prop;
                                c.position = pos;
                                c.n_neighborhoods = nb;
                                out.push_back(c);
                            }
                    }
                }
            }
    return out;
}

DgpConfig make_dgp_config(const CellCoord& coord, std::uint64_t seed) {
    DgpConfig cfg;
    cfg.n_units = coord.n_units;
    cfg.n_times = coord.n_times;
    if (coord.r2 > 0.0) cfg.r2_target = coord.r2;
    cfg.master_seed = seed;
    if (!coord.is_null()) {
        if (coord.kind != TestKind::spatial) {
            ChangeSpec cs;
            cs.proportion = coord.proportion;
            cs.position = coord.position;
            cfg.change_spec = cs;
        }
        if (coord.kind != TestKind::structural) {
            HeteroSpec hs;
            hs.proportion = coord.proportion;
            hs.n_neighborhoods_affected = coord.n_neighborhoods;
            cfg.hetero_spec = hs;
        }
    }
    return cfg;
}

namespace {

// FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

ReplicationRecord run_replication(const ExperimentGrid& grid, const CellCoord& coord,
                                  int rep) {
    ReplicationRecord rec;
    rec.rep = rep;
    rec.seed = replication_seed(grid.master_seed, coord, rep);
    rec.coverage2 = std::numeric_limits<double>::quiet_NaN();

    const GeneratedPanel panel = generate(make_dgp_config(coord, rec.seed));
    TestSettings settings = grid.test;
    settings.seed = derive_seed(rec.seed, 0x7e57ULL);

    switch (coord.kind) {
        case TestKind::structural: {
            const TestOutcome out = structural_change_test(panel.dataset, settings);
            rec.coverage = 100.0 * (1.0 - out.fraction_outside);
            rec.reject = out.reject;
            break;
        }
        case TestKind::spatial: {
            const TestOutcome out = spatial_heterogeneity_test(panel.dataset, settings);
            rec.coverage = 100.0 * (1.0 - out.fraction_outside);
            rec.reject = out.reject;
            break;
        }
        case TestKind::joint: {
            const JointOutcome out = joint_test(panel.dataset, settings);
            rec.coverage = 100.0 * (1.0 - out.structural.fraction_outside);
            rec.reject = out.structural.reject;
            rec.coverage2 = 100.0 * (1.0 - out.spatial.fraction_outside);
            rec.reject2 = out.spatial.reject;
            break;
        }
    }
    return rec;
}

json record_to_json(const ReplicationRecord& r) {
    json j{{"rep", r.rep},
           {"seed", r.seed},
           {"coverage", r.coverage},
           {"reject", r.reject},
           {"reject2", r.reject2}};
    if (std::isfinite(r.coverage2)) j["coverage2"] = r.coverage2;
    return j;
}

ReplicationRecord record_from_json(const json& j) {
    ReplicationRecord r;
    r.rep = j.at("rep").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.coverage = j.at("coverage").get<double>();
    r.reject = j.at("reject").get<bool>();
    r.reject2 = j.value("reject2", false);
    r.coverage2 = j.value("coverage2", std::numeric_limits<double>::quiet_NaN());
    return r;
}

} // namespace

std::uint64_t replication_seed(std::uint64_t master, const CellCoord& coord,
                               int rep) {
    return derive_seed(master, fnv1a(coord.key()), static_cast<std::uint64_t>(rep));
}

std::vector<CellResult> run_grid(const ExperimentGrid& grid) {
    grid.validate();
    const auto coords = grid.cells();
    std::vector<CellResult> results(coords.size());

    for (std::size_t ci = 0; ci < coords.size(); ++ci) {
        CellResult& cell = results[ci];
        cell.coord = coords[ci];

        // Resume from checkpoint when available.
        std::map<int, ReplicationRecord> done;
        fs::path ckpt;
        if (!grid.checkpoint_dir.empty()) {
            fs::create_directories(grid.checkpoint_dir);
            ckpt = fs::path(grid.checkpoint_dir) / (cell.coord.key() + ".jsonl");
            if (fs::exists(ckpt)) {
                std::ifstream in(ckpt);
                std::string line;
                while (std::getline(in, line)) {
                    if (line.empty()) continue;
                    const auto rec = record_from_json(json::parse(line));
                    done[rec.rep] = rec;
                }
            }
        }

        std::vector<ReplicationRecord> fresh(grid.replications);
        std::vector<char> computed(grid.replications, 0);
        std::vector<std::string> rep_errors(grid.replications);
        parallel_for(static_cast<std::size_t>(grid.replications), grid.n_workers,
                     [&](std::size_t r) {
                         const int rep = static_cast<int>(r);
                         if (done.count(rep)) return;
                         try {
                             fresh[r] = run_replication(grid, cell.coord, rep);
                             computed[r] = 1;
                         } catch (const Error& err) {
                             rep_errors[r] = err.what();
                         }
                     });

        std::ofstream append;
        if (!ckpt.empty()) append.open(ckpt, std::ios::app);
        for (int rep = 0; rep < grid.replications; ++rep) {
            if (done.count(rep)) {
                cell.reps.push_back(done[rep]);
            } else if (computed[rep]) {
                cell.reps.push_back(fresh[rep]);
                if (append.is_open())
                    append << record_to_json(fresh[rep]).dump() << "\n";
            } else {
                if (cell.error.empty())
                    cell.error = "rep " + std::to_string(rep) + ": " + rep_errors[rep];
            }
        }
        cell.aggregate();
    }
    return results;
}

namespace {

std::string format_cell(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%7.1f", v);
    return buf;
}

} // namespace

std::string emit_table(const std::vector<CellResult>& results, TableLayout layout) {
    if (results.empty()) throw IncompleteGrid("no results");

    // Column axis: (N, T) pairs present in the results.
    std::vector<std::pair<int, int>> cols;
    std::vector<double> props;
    for (const auto& r : results) {
        const std::pair<int, int> nt{r.coord.n_units, r.coord.n_times};
        if (std::find(cols.begin(), cols.end(), nt) == cols.end()) cols.push_back(nt);
        if (!r.coord.is_null() &&
            std::find(props.begin(), props.end(), r.coord.proportion) == props.end())
            props.push_back(r.coord.proportion);
    }
    std::sort(cols.begin(), cols.end());
    std::sort(props.begin(), props.end());

    // Row axis: the position / neighborhood-count values actually present.
    const bool by_pos = layout == TableLayout::by_position;
    std::vector<int> row_values;
    for (const auto& r : results) {
        if (r.coord.is_null()) continue;
        const int v = by_pos ? static_cast<int>(r.coord.position)
                             : r.coord.n_neighborhoods;
        if (std::find(row_values.begin(), row_values.end(), v) == row_values.end())
            row_values.push_back(v);
    }
    std::sort(row_values.begin(), row_values.end());
    std::vector<std::string> row_labels;
    for (int v : row_values) {
        if (by_pos)
            row_labels.push_back(v == 0 ? "Start" : v == 1 ? "Middle" : "End");
        else
            row_labels.push_back(std::to_string(v) +
                                 (v == 1 ? " Neighborhood" : " Neighborhoods"));
    }

    auto lookup = [&](double prop, int row, int n, int t) -> double {
        for (const auto& r : results) {
            const auto& c = r.coord;
            if (c.n_units != n || c.n_times != t) continue;
            if (prop <= 0.0) {
                if (c.is_null()) return r.mean_coverage;
                continue;
            }
            if (c.is_null() || c.proportion != prop) continue;
            if (by_pos && static_cast<int>(c.position) == row) return r.mean_coverage;
            if (!by_pos && c.n_neighborhoods == row) return r.mean_coverage;
        }
        throw IncompleteGrid("missing cell: prop=" + std::to_string(prop) +
                             " row=" + std::to_string(row) + " N=" + std::to_string(n) +
                             " T=" + std::to_string(t));
    };

    std::ostringstream os;
    const int label_w = 36;
    os << std::left << std::setw(label_w) << "";
    for (const auto& [n, t] : cols)
        os << std::right << std::setw(12) << ("N=" + std::to_string(n) + ",T=" +
                                              std::to_string(t));
    os << "\n";

    auto emit_row = [&](const std::string& label, double prop, int row) {
        os << std::left << std::setw(label_w) << label;
        for (const auto& [n, t] : cols)
            os << std::right << std::setw(12) << format_cell(lookup(prop, row, n, t));
        os << "\n";
    };

    bool have_null = std::any_of(results.begin(), results.end(),
                                 [](const CellResult& r) { return r.coord.is_null(); });
    if (have_null)
        emit_row(by_pos ? "No Structural Change" : "No Spatial Heterogeneity", 0.0, -1);
    char panel = 'a';
    for (double prop : props) {
        std::ostringstream hdr;
        hdr << "(" << panel++ << ") Proportion = " << std::setprecision(3)
            << prop * 100 << "%";
        os << hdr.str() << "\n";
        for (std::size_t row = 0; row < row_labels.size(); ++row)
            emit_row("  " + row_labels[row], prop, row_values[row]);
    }
    return os.str();
}

void write_results_csv(const std::vector<CellResult>& results,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path);
    out << "kind,n_units,n_times,r2,proportion,position,neighborhoods,"
           "replications,mean_coverage,rejection_rate\n";
    out << std::setprecision(17);
    for (const auto& r : results) {
        const auto& c = r.coord;
        out << to_string(c.kind) << ',' << c.n_units << ',' << c.n_times << ','
            << c.r2 << ',' << c.proportion << ',' << to_string(c.position) << ','
            << c.n_neighborhoods << ',' << r.replications << ',' << r.mean_coverage
            << ',' << r.rejection_rate << "\n";
    }
}

std::vector<CellResult> read_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<CellResult> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        auto next = [&] {
            if (!std::getline(ss, field, ',')) throw ConfigError("short CSV row");
            return field;
        };
        CellResult r;
        r.coord.kind = test_kind_from_string(next());
        r.coord.n_units = std::stoi(next());
        r.coord.n_times = std::stoi(next());
        r.coord.r2 = std::stod(next());
        r.coord.proportion = std::stod(next());
        r.coord.position = position_from_string(next());
        r.coord.n_neighborhoods = std::stoi(next());
        r.replications = std::stoi(next());
        r.mean_coverage = std::stod(next());
        r.rejection_rate = std::stod(next());
        out.push_back(std::move(r));
    }
    return out;
}

ExperimentGrid ExperimentGrid::from_json(const json& j) {
    ExperimentGrid g;
    if (j.contains("kind")) g.kind = test_kind_from_string(j["kind"].get<std::string>());
    if (j.contains("n_units")) g.n_units = j["n_units"].get<std::vector<int>>();
    if (j.contains("n_times")) g.n_times = j["n_times"].get<std::vector<int>>();
    if (j.contains("r2_levels"))
        g.r2_levels = j["r2_levels"].get<std::vector<double>>();
    if (j.contains("proportions"))
        g.proportions = j["proportions"].get<std::vector<double>>();
    if (j.contains("positions")) {
        g.positions.clear();
        for (const auto& p : j["positions"])
            g.positions.push_back(position_from_string(p.get<std::string>()));
    }
    if (j.contains("neighborhood_counts"))
        g.neighborhood_counts = j["neighborhood_counts"].get<std::vector<int>>();
    if (j.contains("include_null")) g.include_null = j["include_null"].get<bool>();
    if (j.contains("replications")) g.replications = j["replications"].get<int>();
    if (j.contains("master_seed"))
        g.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("checkpoint_dir"))
        g.checkpoint_dir = j["checkpoint_dir"].get<std::string>();
    if (j.contains("n_workers")) g.n_workers = j["n_workers"].get<int>();
    if (j.contains("m")) g.test.m = j["m"].get<int>();
    if (j.contains("B")) g.test.B = j["B"].get<int>();
    if (j.contains("n")) g.test.n = j["n"].get<int>();
    if (j.contains("l")) g.test.l = j["l"].get<int>();
    if (j.contains("tau")) g.test.tau = j["tau"].get<double>();
    if (j.contains("alpha")) g.test.alpha = j["alpha"].get<double>();
    if (j.contains("stat_kind"))
        g.test.stat_kind = stat_kind_from_string(j["stat_kind"].get<std::string>());
    return g;
}

json ExperimentGrid::to_json() const {
    json positions_j = json::array();
    for (auto p : positions) positions_j.push_back(to_string(p));
    return json{{"kind", to_string(kind)},
                {"n_units", n_units},
                {"n_times", n_times},
                {"r2_levels", r2_levels},
                {"proportions", proportions},
                {"positions", positions_j},
                {"neighborhood_counts", neighborhood_counts},
                {"include_null", include_null},
                {"replications", replications},
                {"master_seed", master_seed},
                {"checkpoint_dir", checkpoint_dir},
                {"n_workers", n_workers},
                {"m", test.m},
                {"B", test.B},
                {"n", test.n},
                {"l", test.l},
                {"tau", test.tau},
                {"alpha", test.alpha},
                {"stat_kind", to_string(test.stat_kind)}};
}

} // namespace stpanel
