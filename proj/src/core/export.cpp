#include "dsketch/core/export.hpp"

#include <png.h>

#include <cstdio>
#include <string>

#include "dsketch/core/error.hpp"
#include "dsketch/core/sketch_io.hpp"

namespace dsketch {
namespace {

void append_number(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  out += buf;
}

}  // namespace

std::string svg_string(const Sketch& sketch) {
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(sketch.canvas_width) +
         "\" height=\"" + std::to_string(sketch.canvas_height) + "\" viewBox=\"0 0 " +
         std::to_string(sketch.canvas_width) + " " + std::to_string(sketch.canvas_height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& s : sketch.strokes) {
    out += "<path class=\"";
    out += to_string(s.kind);
    out += "\" fill=\"none\" stroke-linecap=\"round\" stroke-linejoin=\"round\" ";
    if (s.is_content()) {
      out += "stroke=\"black\" ";
    } else {
      out += "stroke=\"#4a90d9\" stroke-dasharray=\"4 3\" ";
    }
    out += "stroke-width=\"";
    append_number(out, s.width);
    out += "\" d=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      out += i == 0 ? "M " : " L ";
      append_number(out, s.points[i].x);
      out += ' ';
      append_number(out, s.points[i].y);
    }
    out += "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

void export_svg(const Sketch& sketch, const std::filesystem::path& path) {
  write_file_atomic(path, svg_string(sketch));
}

void export_png(const RasterImage& raster, const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(raster.width);
  image.height = static_cast<png_uint_32>(raster.height);
  image.format = PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, raster.pixels.data(), 0, nullptr)) {
    fail(ErrorCode::kIo, std::string("png encoding failed: ") + image.message);
  }
  std::string bytes(size, '\0');
  if (!png_image_write_to_memory(&image, bytes.data(), &size, 0, raster.pixels.data(), 0,
                                 nullptr)) {
    fail(ErrorCode::kIo, std::string("png encoding failed: ") + image.message);
  }
  bytes.resize(size);
  write_file_atomic(path, bytes);
}

RasterImage read_png(const std::filesystem::path& path) {
  const std::string bytes = read_text_file(path);
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    fail(ErrorCode::kFormat, "'" + path.string() + "' is not a readable PNG: " + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> gray(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, gray.data(), 0, nullptr)) {
    fail(ErrorCode::kFormat, "'" + path.string() + "': " + image.message);
  }
  RasterImage out(static_cast<int>(image.width), static_cast<int>(image.height));
  for (std::size_t i = 0; i < gray.size(); ++i) {
    out.pixels[i] = gray[i] < 128 ? kForeground : kBackground;
  }
  return out;
}

}  // namespace dsketch
