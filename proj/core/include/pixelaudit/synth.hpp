#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pixelaudit/image.hpp"

namespace pixelaudit {

// Procedural RGB image: overlapping discs with power-law radii over a 1/f
// texture, smooth chroma, mild sensor noise. Rendered at twice the size and
// box-downsampled.
ImageRecord synthesize_image(const std::string& id, std::uint64_t seed, int size = 32);

// Ids are "img_00000.png", "img_00001.png", ...
std::vector<ImageRecord> synthesize_dataset(std::size_t count, std::uint64_t seed, int size = 32);

}  // namespace pixelaudit
