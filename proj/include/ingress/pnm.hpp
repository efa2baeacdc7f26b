#pragma once

#include <string>

#include "ingress/image.hpp"

namespace ingress {

// Binary PNM image I/O: PPM (P6) for RGB, PGM (P5) for grayscale.
// Writers always emit maxval 255; readers accept any maxval in [1,255]
// and '#' comments anywhere in the header. Write-then-read round-trips
// are bit-exact. Malformed or truncated files raise std::runtime_error.

RgbImage read_ppm(const std::string& path);
void write_ppm(const RgbImage& img, const std::string& path);

GrayImage read_pgm(const std::string& path);
void write_pgm(const GrayImage& img, const std::string& path);

}  // namespace ingress
