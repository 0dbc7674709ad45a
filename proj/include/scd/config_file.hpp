#pragma once

#include <string>

#include "scd/harness.hpp"

namespace scd {

// Key-value config with [section] headers and '#' comments. Unknown keys are
// rejected. See configs/ for the shipped examples.
ExperimentConfig parse_config_file(const std::string& path);

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "config");

}  // namespace scd
