#pragma once

#include <string>
#include <vector>

#include "lindcd/config.hpp"

namespace lindcd::harness {

// Built-in experiment manifests covering the standard annealing scenarios
// across ramp times, coupling strengths and CD protocols. Throws ConfigError
// for unknown names.
RunConfig preset(const std::string& name);

std::vector<std::string> preset_names();

// Canonical serialized form; byte-identical to the checked-in preset file.
std::string preset_json(const std::string& name);

}  // namespace lindcd::harness
