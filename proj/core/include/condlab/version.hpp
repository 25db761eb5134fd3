#pragma once

#include <string_view>

namespace condlab {

inline constexpr std::string_view kVersion = "0.1.0";

// Version stamp for every data file the tools emit (CSV comment line or JSON
// field). Loaders reject files whose stamp does not match.
inline constexpr int kSchemaVersion = 1;

// Version of the parameter snapshot layout (header + a + W rows).
inline constexpr int kParamsFormatVersion = 1;

}  // namespace condlab
