#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace turbrest {

// Writes to "<path>.tmp-<pid>" then renames over `path`; a failed write leaves
// no partial output behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

// "%.9g" formatting used by every CSV emitter.
std::string format_number(double value);

}  // namespace turbrest
