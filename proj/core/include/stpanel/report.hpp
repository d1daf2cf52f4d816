#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "stpanel/dgp.hpp"
#include "stpanel/hypothesis.hpp"

namespace stpanel {

/// Structured report of one test run; contains every setting needed to
/// reproduce it (seeds, sizes, tolerances, decision rule inputs).
nlohmann::json to_json(const BootstrapCI& ci);
nlohmann::json to_json(const TestSettings& settings);
nlohmann::json to_json(const TestOutcome& outcome);
nlohmann::json to_json(const JointOutcome& outcome);
nlohmann::json to_json(const GroundTruth& truth);

TestSettings test_settings_from_json(const nlohmann::json& j);

/// Short human-readable decision summary.
std::string summarize(const TestOutcome& outcome);

void write_json_file(const nlohmann::json& j, const std::string& path);

} // namespace stpanel
