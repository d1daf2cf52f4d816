#pragma once

#include <string>
#include <vector>

#include "stpanel/panel.hpp"

namespace stpanel {

/// Column names for long-format panel CSV. Empty entries fall back to the
/// defaults: unit, time, y, x1..xp (every column starting with "x"),
/// w (plus w2.. for vector W), neighborhood (optional).
struct ColumnMap {
    std::string unit = "unit";
    std::string time = "time";
    std::string y = "y";
    std::vector<std::string> x;  // empty: autodetect x1, x2, ...
    std::vector<std::string> w;  // empty: autodetect w, w2, ...
    std::string neighborhood = "neighborhood";  // optional column
};

/// Load a complete balanced long-format panel. Time sorts ascending per
/// unit by the order of first appearance of the time label's numeric value
/// when numeric, lexical otherwise.
///
/// Throws UnbalancedPanel (missing unit x time cell, names it),
/// DuplicateCell, NonNumericField (names the offending row), ConfigError.
PanelDataset load_panel_csv(const std::string& path, const ColumnMap& map = {});

/// Inverse of load_panel_csv; writes full precision.
void write_panel_csv(const PanelDataset& dataset, const std::string& path);

} // namespace stpanel
