#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shapepose/pointmap.hpp"

namespace shapepose {

struct Image16 {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> pixels;
};

/// Single-channel PNG (8- or 16-bit, gray or gray+alpha) widened to 16 bits.
/// Colour PNGs are reduced to their first channel.
Image16 read_png_gray16(const std::string& path);
/// Nonzero pixels are true.
BinaryMask read_png_mask(const std::string& path);

void write_png_gray16(const std::string& path, const Image16& img);
void write_png_mask(const std::string& path, const BinaryMask& mask);

}  // namespace shapepose
