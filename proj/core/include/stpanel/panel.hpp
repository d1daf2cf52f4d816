#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "stpanel/errors.hpp"

namespace stpanel {

/// Balanced N x T panel: response y, p covariates, q neighborhood-system
/// columns, and a neighborhood label per unit. Immutable after validation.
struct PanelDataset {
    int n_units = 0;            // N
    int n_times = 0;            // T
    Eigen::MatrixXd y;          // N x T
    std::vector<Eigen::MatrixXd> x;  // p matrices, each N x T
    std::vector<Eigen::MatrixXd> w;  // q matrices, each N x T
    std::vector<int> neighborhood;   // per unit, labels in 1..K
    std::vector<std::string> unit_ids;
    std::vector<std::string> time_ids;

    int n_covariates() const { return static_cast<int>(x.size()); }
    int n_w_columns() const { return static_cast<int>(w.size()); }

    /// Parameter count of the full regression [1, X, W].
    int n_params() const { return 1 + n_covariates() + n_w_columns(); }

    /// Throws DimensionMismatch / ConfigError on inconsistent extents,
    /// non-finite values, N < 2, T < 3, or missing neighborhood labels.
    void validate() const;

    /// Time-series design matrix for one unit: T rows of [1, X_i, W_i].
    Eigen::MatrixXd unit_design(int unit) const;
    /// Response series for one unit (length T).
    Eigen::VectorXd unit_response(int unit) const;

    /// Cross-section design matrix at one time point: N rows of [1, X_t, W_t].
    Eigen::MatrixXd cross_section_design(int time) const;
    /// Cross-section response at one time point (length N).
    Eigen::VectorXd cross_section_response(int time) const;
};

} // namespace stpanel
