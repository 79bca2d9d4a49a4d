#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace precog {

/// Writes to a sibling temp file and renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Fixed-point rendering with `decimals` places; "-0.0000" is printed as "0.0000".
std::string format_fixed(double value, int decimals = 4);

/// Rounds to `decimals` places for JSON output.
double round_to(double value, int decimals = 4);

std::string utc_timestamp();

}  // namespace precog
