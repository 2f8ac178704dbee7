#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace vmocap {

struct Rgba {
  std::uint8_t r = 0, g = 0, b = 0, a = 0;
  bool operator==(const Rgba&) const = default;
};

// Row-major RGBA8.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int w, int h, Rgba fill = {});

  bool empty() const { return width == 0 || height == 0; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }

  Rgba at(int x, int y) const {
    const std::uint8_t* p = &pixels[(static_cast<std::size_t>(y) * width + x) * 4];
    return {p[0], p[1], p[2], p[3]};
  }
  void set(int x, int y, Rgba c) {
    std::uint8_t* p = &pixels[(static_cast<std::size_t>(y) * width + x) * 4];
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
    p[3] = c.a;
  }

  bool operator==(const Image&) const = default;
};

// PNG output is deterministic for a given image: fixed compression settings,
// no timestamps. Opaque images may be stored without the alpha channel.
std::vector<std::uint8_t> encode_png(const Image& image, bool keep_alpha);
void write_png(const Image& image, const std::filesystem::path& path, bool keep_alpha);

// Decodes PNG or JPEG (sniffed from the leading bytes) into RGBA.
Image decode_image(std::span<const std::uint8_t> bytes);
Image read_image(const std::filesystem::path& path);

}  // namespace vmocap
