#pragma once

#include <string>
#include <vector>

#include "ddgs/core.hpp"

namespace ddgs {

// Monochrome float image in [0,1], row-major, pixel (x, y) at y*width + x.
struct RenderedImage {
    int width = 0, height = 0;
    std::vector<double> pixels;

    RenderedImage() = default;
    RenderedImage(int w, int h) : width(w), height(h), pixels(static_cast<size_t>(w) * h, 0.0) {}

    double at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
    double& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return pixels.size(); }
};

// 16-bit grayscale PNG, values scaled by 65535 after clamping to [0,1].
void write_png16(const RenderedImage& img, const std::string& path);

// Raw little-endian float32 with a JSON sidecar ({width, height, dtype}).
// `path` may name the .raw file or the .json sidecar.
void write_image_raw(const RenderedImage& img, const std::string& path);
RenderedImage read_image_raw(const std::string& path);

}  // namespace ddgs
