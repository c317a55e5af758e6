#pragma once

#include <string_view>

namespace stsg {

// Recorded in exported manifests; bump when the dataset schema or any
// deterministic output format changes.
inline constexpr std::string_view kEngineVersion = "0.1.0";

inline constexpr int kStsgSchemaVersion = 1;

}  // namespace stsg
