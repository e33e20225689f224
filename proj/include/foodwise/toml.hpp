#pragma once

#include <filesystem>
#include <string_view>

#include <nlohmann/json.hpp>

namespace foodwise::toml {

// Reads the subset of TOML our config files use: [table] and [a.b] headers,
// bare or quoted keys (dotted keys too), basic and literal strings,
// integers, floats, booleans, and arrays of those (may span lines). Comments
// start with '#'. Throws Error(BadConfig) with the line number on anything
// else. Bare local dates are returned as "YYYY-MM-DD" strings.
nlohmann::json parse(std::string_view text);
nlohmann::json parse_file(const std::filesystem::path& path);

}  // namespace foodwise::toml
