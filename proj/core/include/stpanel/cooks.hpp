#pragma once

#include "stpanel/ols.hpp"

namespace stpanel {

/// Cook's distance for observation i of a fit:
///   D_i = (e_i^2 / (k * s^2)) * (h_ii / (1 - h_ii)^2)
/// with k the number of fitted parameters.
///
/// Throws LeverageOne when h_ii >= 1 - 1e-8; callers monitoring influence
/// treat that observation as maximally influential.
double cooks_distance(const ModelFit& fit, int i);

/// Max over all observations; LeverageOne maps to +infinity here.
double max_cooks_distance(const ModelFit& fit);

} // namespace stpanel
