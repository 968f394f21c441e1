#pragma once

#include "turbrest/image.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace turbrest {

// Binary PGM (P5). 1-byte samples when max_value <= 255, big-endian 2-byte otherwise.
Frame load_frame(const std::filesystem::path& path);
Frame decode_pgm(const std::string& bytes, const std::string& origin = "<memory>");

// Pixels are rounded half-up and clamped to [0, max_value]. The file is written
// to a sibling temporary and renamed into place.
void save_frame(const Frame& frame, const std::filesystem::path& path);
std::string encode_pgm(const Frame& frame);

Sequence load_sequence(const std::vector<std::filesystem::path>& paths);

// Expands a glob-like pattern (wildcards allowed in the file name component only)
// and returns the matches sorted lexicographically. A pattern without wildcards
// names a single file.
std::vector<std::filesystem::path> expand_pattern(const std::string& pattern);

}  // namespace turbrest
