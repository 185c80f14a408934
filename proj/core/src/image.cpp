#include "pixelaudit/image.hpp"

#include <stdexcept>

#include "pixelaudit/error.hpp"

namespace pixelaudit {

ImageRecord ImageRecord::blank(std::string id, int width, int height, ColorMode mode,
                               std::uint8_t fill) {
  ImageRecord image;
  image.id = std::move(id);
  image.width = width;
  image.height = height;
  image.mode = mode;
  image.pixels.assign(image.pixel_count() * channels(mode), fill);
  return image;
}

void validate(const ImageRecord& image) {
  if (image.width < 1 || image.height < 1) {
    throw std::invalid_argument("image '" + image.id + "' has non-positive dimensions");
  }
  if (image.pixels.size() != image.pixel_count() * image.channel_count()) {
    throw std::invalid_argument("image '" + image.id + "' pixel buffer has wrong length");
  }
}

std::string to_string(LumaFormula formula) {
  switch (formula) {
    case LumaFormula::kHsp: return "HSP";
    case LumaFormula::kBt709: return "BT709";
    case LumaFormula::kBt601: return "BT601";
    case LumaFormula::kBt601Rms: return "BT601_RMS";
    case LumaFormula::kChannelMean: return "CHANNEL_MEAN";
  }
  return "HSP";
}

LumaFormula parse_luma_formula(const std::string& text) {
  for (auto f : {LumaFormula::kHsp, LumaFormula::kBt709, LumaFormula::kBt601,
                 LumaFormula::kBt601Rms, LumaFormula::kChannelMean}) {
    if (to_string(f) == text) return f;
  }
  throw ConfigError("unknown luma formula '" + text + "'");
}

}  // namespace pixelaudit
