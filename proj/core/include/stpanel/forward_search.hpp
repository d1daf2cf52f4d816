#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "stpanel/ols.hpp"
#include "stpanel/panel.hpp"

namespace stpanel {

/// Default jump tolerance for the max-Cook's-D stopping rule.
inline constexpr double kDefaultTau = 0.5;

/// One iteration of the search, exported for diagnostic plotting.
struct ForwardSearchStep {
    std::vector<int> subset;      // observation indices, ascending
    double max_cooks_d = 0.0;     // NaN when the subset fit was skipped
    Eigen::VectorXd delta_hat;    // from the subset fit
    bool rank_deficient = false;  // criterion skipped this iteration
};

struct ForwardSearchTrace {
    std::vector<ForwardSearchStep> steps;           // sizes l, l+1, ..., strictly +1
    std::optional<std::size_t> stop_iteration;      // index of the robust step
    ModelFit robust_fit;                            // fit before the D jump,
                                                    // or the full fit if no jump
    ModelFit full_fit;                              // all N observations
    bool triggered() const { return stop_iteration.has_value(); }
};

/// Forward search over one cross-section. Starts from the l observations
/// with the smallest absolute residuals of the full fit, grows the subset
/// one observation at a time (re-ranking all N absolute residuals against
/// the current subset fit), and stops when the max Cook's D over the subset
/// jumps by more than tau between consecutive iterations. Residual-rank ties
/// break toward the lower observation index.
///
/// Throws DimensionMismatch unless params+1 <= l < N, InitialSubsetSingular
/// when the starting subset is rank-deficient, RankDeficient when even the
/// full design is singular.
ForwardSearchTrace forward_search(const Eigen::MatrixXd& design,
                                  const Eigen::VectorXd& targets, int l,
                                  double tau = kDefaultTau, int n_w_cols = 0);

struct PanelSearchResult {
    std::vector<ForwardSearchTrace> traces;  // one per time point
    Eigen::MatrixXd robust_delta;            // T x q
    Eigen::MatrixXd full_delta;              // T x q
};

/// Default initial subset size, ceil(N/2).
int default_subset_size(int n_units);

/// Runs forward_search independently at every time point. l <= 0 selects
/// the default ceil(N/2); l must also be >= params + 2.
/// Throws UnestimableTimePoint when any time point fails.
PanelSearchResult forward_search_panel(const PanelDataset& dataset, int l = 0,
                                       double tau = kDefaultTau);

} // namespace stpanel
