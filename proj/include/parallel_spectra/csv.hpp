#pragma once

#include <filesystem>
#include <string>

namespace paraspec {

/// Shortest round-trip decimal representation of a double ('.' separator).
std::string format_double(double x);

/// Writes content to path atomically (temp file + rename).
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

} // namespace paraspec
