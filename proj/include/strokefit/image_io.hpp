#pragma once

#include <string>

#include "strokefit/image.hpp"

namespace strokefit {

/// Reads an 8-bit grayscale or RGB PNG, PGM (P2/P5) or PPM (P3/P6), chosen by
/// content. Values become v / 255; alpha channels are dropped.
Image read_image(const std::string& path, Topology topology = Topology::planar);

/// Writes round(255 v), clamped, as PNG, or as PGM/PPM when the path ends in
/// .pgm/.ppm/.pnm.
void write_image(const std::string& path, const Image& image);

}  // namespace strokefit
