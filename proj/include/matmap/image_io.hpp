#pragma once

#include <string>

#include "matmap/geometry.hpp"

namespace matmap {

// Depth images travel as binary PGM (P5), maxval 65535, big-endian samples
// per the PGM spec. RGB images travel as binary PPM (P6), maxval 255.

DepthImage read_pgm16(const std::string& path);
void write_pgm16(const DepthImage& image, const std::string& path);

RgbImage read_ppm(const std::string& path);
void write_ppm(const RgbImage& image, const std::string& path);

}  // namespace matmap
