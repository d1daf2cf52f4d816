#pragma once

#include <stdexcept>
#include <string>

namespace stpanel {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Design matrix and target extents disagree.
struct DimensionMismatch : Error {
    using Error::Error;
};

/// Normal-equations system singular beyond tolerance (collinear columns
/// or a subset smaller than the parameter count).
struct RankDeficient : Error {
    using Error::Error;
};

/// AR(1) regression undefined: sum of squared lagged values is zero.
struct DegenerateSeries : Error {
    using Error::Error;
};

/// Leverage at (or numerically at) one: the observation determines its
/// own fit and Cook's distance is undefined.
struct LeverageOne : Error {
    using Error::Error;
};

/// Forward search cannot start: the initial subset is rank-deficient.
struct InitialSubsetSingular : Error {
    using Error::Error;
};

/// A spatial unit produced no usable sieve replicates.
struct UnestimableUnit : Error {
    using Error::Error;
};

/// A time point produced no usable forward-search trace.
struct UnestimableTimePoint : Error {
    using Error::Error;
};

/// Bad configuration values (proportions, alpha, sizes, ...).
struct ConfigError : Error {
    using Error::Error;
};

// CSV ingestion errors. Each message names the offending row.
struct UnbalancedPanel : Error {
    using Error::Error;
};
struct DuplicateCell : Error {
    using Error::Error;
};
struct NonNumericField : Error {
    using Error::Error;
};

/// A table layout cell was requested that no CellResult covers.
struct IncompleteGrid : Error {
    using Error::Error;
};

} // namespace stpanel
