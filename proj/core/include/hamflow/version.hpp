#pragma once

#include <nlohmann/json.hpp>

namespace hamflow {

const char* version();

/// Versions of hamflow and the numerical libraries it was built against.
nlohmann::json build_versions();

}  // namespace hamflow
