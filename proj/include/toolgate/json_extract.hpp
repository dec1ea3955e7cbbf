#pragma once

#include <optional>
#include <string>

#include "json.hpp"

namespace toolgate {

/// First parsable top-level JSON object embedded in free text. Tolerates
/// surrounding prose and code fences; respects string literals and escapes
/// while balancing braces. nullopt when no object parses.
std::optional<nlohmann::json> extract_first_json_object(const std::string& raw);

}  // namespace toolgate
