#pragma once

#include <string>
#include <vector>

#include "etdelay/config.hpp"

namespace etdelay {

/// Names of the built-in scenarios: example1, example2-fig2, example2-fig3.
std::vector<std::string> builtin_scenario_names();

/// Throws ConfigError for an unknown name.
ScenarioConfig builtin_scenario(const std::string& name);

} // namespace etdelay
