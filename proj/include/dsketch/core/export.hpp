#pragma once

#include <filesystem>
#include <string>

#include "dsketch/core/raster.hpp"
#include "dsketch/core/sketch.hpp"

namespace dsketch {

/// One <path> per stroke in drawing order; viewBox equals the canvas.
std::string svg_string(const Sketch& sketch);
void export_svg(const Sketch& sketch, const std::filesystem::path& path);

/// 8-bit grayscale PNG, 0 = stroke, 255 = background.
void export_png(const RasterImage& raster, const std::filesystem::path& path);

/// Reads any 8-bit PNG and thresholds luminance below 128 to foreground.
RasterImage read_png(const std::filesystem::path& path);

}  // namespace dsketch
