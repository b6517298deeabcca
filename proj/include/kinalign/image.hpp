#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kinalign {

/// Single-channel float image, row-major, row 0 at the top.
struct ImageGray {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    ImageGray() = default;
    ImageGray(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t pixel_count() const { return data.size(); }
    bool same_size(const ImageGray& o) const { return width == o.width && height == o.height; }
};

/// Interleaved RGB float image, row-major, row 0 at the top.
struct ImageRgb {
    int width = 0;
    int height = 0;
    std::vector<double> data;  // 3 * width * height

    ImageRgb() = default;
    ImageRgb(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, fill) {}

    double& at(int x, int y, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    double at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    bool same_size(const ImageRgb& o) const { return width == o.width && height == o.height; }

    static ImageRgb from_gray(const ImageGray& g);
    ImageGray mean_channel() const;
};

/// Binary mask; values are 0 or 1.
struct MaskImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    MaskImage() = default;
    MaskImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t pixel_count() const { return data.size(); }
    bool same_size(const MaskImage& o) const { return width == o.width && height == o.height; }
    std::size_t count_set() const;
};

// --- PFM (32-bit float, little-endian via negative scale) ---------------
// Scanlines are stored bottom-to-top per the PFM convention.

void save_pfm(const ImageGray& image, const std::string& path);
void save_pfm(const ImageRgb& image, const std::string& path);
ImageGray load_pfm_gray(const std::string& path);
ImageRgb load_pfm_rgb(const std::string& path);

// --- PNG (8-bit, no gamma chunk) -----------------------------------------
// Float values are clamped to [0,1] and quantized with round(v * 255).

void save_png(const ImageRgb& image, const std::string& path);
void save_png(const ImageGray& image, const std::string& path);
void save_png(const MaskImage& mask, const std::string& path);
ImageRgb load_png_rgb(const std::string& path);
/// Reads any 8/16-bit PNG as a binary mask; nonzero luminance = 1.
MaskImage load_png_mask(const std::string& path);

}  // namespace kinalign
