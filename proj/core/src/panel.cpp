#include "stpanel/panel.hpp"

#include <cmath>

namespace stpanel {

void PanelDataset::validate() const {
    if (n_units < 2)
        throw ConfigError("panel needs at least 2 units, got " + std::to_string(n_units));
    if (n_times < 3)
        throw ConfigError("panel needs at least 3 time points, got " + std::to_string(n_times));

    auto check = [&](const Eigen::MatrixXd& m, const std::string& name) {
        if (m.rows() != n_units || m.cols() != n_times)
            throw DimensionMismatch(name + " has extents " + std::to_string(m.rows()) + "x" +
                                    std::to_string(m.cols()) + ", expected " +
                                    std::to_string(n_units) + "x" + std::to_string(n_times));
        if (!m.allFinite())
            throw ConfigError(name + " contains non-finite values");
    };
    check(y, "y");
    for (std::size_t j = 0; j < x.size(); ++j) check(x[j], "x" + std::to_string(j + 1));
    for (std::size_t j = 0; j < w.size(); ++j) check(w[j], "w" + std::to_string(j + 1));

    if (static_cast<int>(neighborhood.size()) != n_units)
        throw DimensionMismatch("neighborhood labels: " + std::to_string(neighborhood.size()) +
                                " entries for " + std::to_string(n_units) + " units");
    for (int lbl : neighborhood)
        if (lbl < 1) throw ConfigError("neighborhood labels must be >= 1");
    if (!unit_ids.empty() && static_cast<int>(unit_ids.size()) != n_units)
        throw DimensionMismatch("unit_ids length mismatch");
    if (!time_ids.empty() && static_cast<int>(time_ids.size()) != n_times)
        throw DimensionMismatch("time_ids length mismatch");
}

Eigen::MatrixXd PanelDataset::unit_design(int unit) const {
    const int p = n_covariates(), q = n_w_columns();
    Eigen::MatrixXd d(n_times, 1 + p + q);
    d.col(0).setOnes();
    for (int j = 0; j < p; ++j) d.col(1 + j) = x[j].row(unit).transpose();
    for (int j = 0; j < q; ++j) d.col(1 + p + j) = w[j].row(unit).transpose();
    return d;
}

Eigen::VectorXd PanelDataset::unit_response(int unit) const {
    return y.row(unit).transpose();
}

Eigen::MatrixXd PanelDataset::cross_section_design(int time) const {
    const int p = n_covariates(), q = n_w_columns();
    Eigen::MatrixXd d(n_units, 1 + p + q);
    d.col(0).setOnes();
    for (int j = 0; j < p; ++j) d.col(1 + j) = x[j].col(time);
    for (int j = 0; j < q; ++j) d.col(1 + p + j) = w[j].col(time);
    return d;
}

Eigen::VectorXd PanelDataset::cross_section_response(int time) const {
    return y.col(time);
}

} // namespace stpanel
