#include "stpanel/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace stpanel {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim whitespace and CR
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_number(const std::string& s, int row, const std::string& col) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw NonNumericField("row " + std::to_string(row) + ", column '" + col +
                              "': '" + s + "' is not numeric");
    }
}

// Numeric-aware label ordering so times 2 and 10 sort as expected.
bool label_less(const std::string& a, const std::string& b) {
    try {
        std::size_t pa = 0, pb = 0;
        const double va = std::stod(a, &pa);
        const double vb = std::stod(b, &pb);
        if (pa == a.size() && pb == b.size()) return va < vb;
    } catch (const std::exception&) {
    }
    return a < b;
}

int find_column(const std::vector<std::string>& header, const std::string& name,
                bool required) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        if (required) throw ConfigError("CSV is missing column '" + name + "'");
        return -1;
    }
    return static_cast<int>(it - header.begin());
}

} // namespace

PanelDataset load_panel_csv(const std::string& path, const ColumnMap& map) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path + " is empty");
    const auto header = split_csv_line(line);

    const int ci_unit = find_column(header, map.unit, true);
    const int ci_time = find_column(header, map.time, true);
    const int ci_y = find_column(header, map.y, true);
    const int ci_nbhd = find_column(header, map.neighborhood, false);

    std::vector<std::string> x_names = map.x;
    std::vector<std::string> w_names = map.w;
    if (x_names.empty())
        for (int j = 1; find_column(header, "x" + std::to_string(j), false) >= 0; ++j)
            x_names.push_back("x" + std::to_string(j));
    if (w_names.empty()) {
        if (find_column(header, "w", false) >= 0) w_names.push_back("w");
        for (int j = 2; find_column(header, "w" + std::to_string(j), false) >= 0; ++j)
            w_names.push_back("w" + std::to_string(j));
    }
    if (x_names.empty()) throw ConfigError("no covariate (x) columns found");
    if (w_names.empty()) throw ConfigError("no neighborhood-variable (w) column found");
    std::vector<int> ci_x, ci_w;
    for (const auto& nm : x_names) ci_x.push_back(find_column(header, nm, true));
    for (const auto& nm : w_names) ci_w.push_back(find_column(header, nm, true));

    struct Cell {
        double y;
        std::vector<double> x, w;
        int nbhd;
    };
    std::map<std::pair<std::string, std::string>, Cell> cells;
    std::vector<std::string> units, times;
    std::map<std::string, int> nbhd_of;

    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() < header.size())
            throw ConfigError("row " + std::to_string(row) + " has " +
                              std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(header.size()));
        const std::string unit = fields[ci_unit];
        const std::string time = fields[ci_time];

        Cell cell;
        cell.y = parse_number(fields[ci_y], row, map.y);
        for (std::size_t j = 0; j < ci_x.size(); ++j)
            cell.x.push_back(parse_number(fields[ci_x[j]], row, x_names[j]));
        for (std::size_t j = 0; j < ci_w.size(); ++j)
            cell.w.push_back(parse_number(fields[ci_w[j]], row, w_names[j]));
        cell.nbhd = ci_nbhd >= 0 ? static_cast<int>(parse_number(
                                       fields[ci_nbhd], row, map.neighborhood))
                                 : 1;

        if (!cells.emplace(std::make_pair(unit, time), cell).second)
            throw DuplicateCell("row " + std::to_string(row) + ": duplicate cell (unit=" +
                                unit + ", time=" + time + ")");
        if (std::find(units.begin(), units.end(), unit) == units.end())
            units.push_back(unit);
        if (std::find(times.begin(), times.end(), time) == times.end())
            times.push_back(time);
        const auto prev = nbhd_of.find(unit);
        if (prev == nbhd_of.end())
            nbhd_of[unit] = cell.nbhd;
        else if (prev->second != cell.nbhd)
            throw ConfigError("row " + std::to_string(row) + ": unit " + unit +
                              " has conflicting neighborhood labels");
    }

    std::sort(units.begin(), units.end(), label_less);
    std::sort(times.begin(), times.end(), label_less);

    PanelDataset ds;
    ds.n_units = static_cast<int>(units.size());
    ds.n_times = static_cast<int>(times.size());
    ds.unit_ids = units;
    ds.time_ids = times;
    ds.x.assign(ci_x.size(), Eigen::MatrixXd(ds.n_units, ds.n_times));
    ds.w.assign(ci_w.size(), Eigen::MatrixXd(ds.n_units, ds.n_times));
    ds.y.resize(ds.n_units, ds.n_times);
    ds.neighborhood.resize(ds.n_units);

    for (int i = 0; i < ds.n_units; ++i) {
        ds.neighborhood[i] = nbhd_of[units[i]];
        for (int t = 0; t < ds.n_times; ++t) {
            const auto it = cells.find({units[i], times[t]});
            if (it == cells.end())
                throw UnbalancedPanel("missing cell (unit=" + units[i] + ", time=" +
                                      times[t] + ")");
            const Cell& c = it->second;
            ds.y(i, t) = c.y;
            for (std::size_t j = 0; j < ds.x.size(); ++j) ds.x[j](i, t) = c.x[j];
            for (std::size_t j = 0; j < ds.w.size(); ++j) ds.w[j](i, t) = c.w[j];
        }
    }
    ds.validate();
    return ds;
}

void write_panel_csv(const PanelDataset& dataset, const std::string& path) {
    dataset.validate();
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path);

    out << "unit,time,y";
    for (std::size_t j = 0; j < dataset.x.size(); ++j) out << ",x" << j + 1;
    out << ",w";
    for (std::size_t j = 1; j < dataset.w.size(); ++j) out << ",w" << j + 1;
    out << ",neighborhood\n";

    out << std::setprecision(17);
    for (int i = 0; i < dataset.n_units; ++i) {
        const std::string unit = dataset.unit_ids.empty() ? std::to_string(i + 1)
                                                          : dataset.unit_ids[i];
        for (int t = 0; t < dataset.n_times; ++t) {
            const std::string time = dataset.time_ids.empty() ? std::to_string(t + 1)
                                                              : dataset.time_ids[t];
            out << unit << ',' << time << ',' << dataset.y(i, t);
            for (const auto& xm : dataset.x) out << ',' << xm(i, t);
            for (const auto& wm : dataset.w) out << ',' << wm(i, t);
            out << ',' << dataset.neighborhood[i] << "\n";
        }
    }
}

} // namespace stpanel
