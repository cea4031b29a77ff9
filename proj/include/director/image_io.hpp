#pragma once

#include <filesystem>
#include <utility>

#include "director/frame.hpp"

namespace director {

// Binary PPM (P6) and PGM (P5), maxval 255. PGM expands to RGB on read.
Frame read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const Frame& frame);

// Parses only the header; cheap probe for dimensions.
std::pair<int, int> read_ppm_dimensions(const std::filesystem::path& path);

} // namespace director
