#include "kinalign/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "kinalign/errors.hpp"

namespace kinalign {

ImageRgb ImageRgb::from_gray(const ImageGray& g) {
    ImageRgb out(g.width, g.height);
    for (std::size_t i = 0; i < g.data.size(); ++i) {
        out.data[i * 3 + 0] = g.data[i];
        out.data[i * 3 + 1] = g.data[i];
        out.data[i * 3 + 2] = g.data[i];
    }
    return out;
}

ImageGray ImageRgb::mean_channel() const {
    ImageGray out(width, height);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = (data[i * 3] + data[i * 3 + 1] + data[i * 3 + 2]) / 3.0;
    }
    return out;
}

std::size_t MaskImage::count_set() const {
    std::size_t n = 0;
    for (std::uint8_t v : data) {
        n += (v != 0);
    }
    return n;
}

// --- PFM -----------------------------------------------------------------

namespace {

bool host_is_little_endian() {
    const std::uint16_t probe = 1;
    return *reinterpret_cast<const std::uint8_t*>(&probe) == 1;
}

void write_pfm(const std::string& path, const double* data, int width, int height,
               int channels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("save_pfm: cannot open " + path + " for writing");
    }
    out << (channels == 3 ? "PF" : "Pf") << "\n"
        << width << " " << height << "\n"
        << "-1.0\n";
    std::vector<float> row(static_cast<std::size_t>(width) * channels);
    for (int y = height - 1; y >= 0; --y) {  // bottom-up
        const double* src = data + static_cast<std::size_t>(y) * width * channels;
        for (std::size_t i = 0; i < row.size(); ++i) {
            row[i] = static_cast<float>(src[i]);
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    if (!out) {
        throw IoError("save_pfm: write failed for " + path);
    }
}

void read_pfm(const std::string& path, std::vector<double>& data, int& width,
              int& height, int& channels) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("load_pfm: cannot open " + path);
    }
    std::string magic;
    double scale = 0.0;
    in >> magic >> width >> height >> scale;
    if (!in || (magic != "PF" && magic != "Pf") || width < 1 || height < 1 ||
        scale == 0.0) {
        throw ParseError("load_pfm: malformed header in " + path);
    }
    in.get();  // single whitespace after the scale
    channels = magic == "PF" ? 3 : 1;
    const bool file_little = scale < 0.0;

    data.assign(static_cast<std::size_t>(width) * height * channels, 0.0);
    std::vector<float> row(static_cast<std::size_t>(width) * channels);
    for (int y = height - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(float)));
        if (!in) {
            throw ParseError("load_pfm: truncated pixel data in " + path);
        }
        if (file_little != host_is_little_endian()) {
            for (float& v : row) {
                auto* b = reinterpret_cast<std::uint8_t*>(&v);
                std::swap(b[0], b[3]);
                std::swap(b[1], b[2]);
            }
        }
        double* dst = data.data() + static_cast<std::size_t>(y) * width * channels;
        for (std::size_t i = 0; i < row.size(); ++i) {
            dst[i] = row[i];
        }
    }
}

}  // namespace

void save_pfm(const ImageGray& image, const std::string& path) {
    write_pfm(path, image.data.data(), image.width, image.height, 1);
}

void save_pfm(const ImageRgb& image, const std::string& path) {
    write_pfm(path, image.data.data(), image.width, image.height, 3);
}

ImageGray load_pfm_gray(const std::string& path) {
    std::vector<double> data;
    int w = 0, h = 0, c = 0;
    read_pfm(path, data, w, h, c);
    if (c != 1) {
        throw ParseError("load_pfm_gray: " + path + " is not grayscale");
    }
    ImageGray out(w, h);
    out.data = std::move(data);
    return out;
}

ImageRgb load_pfm_rgb(const std::string& path) {
    std::vector<double> data;
    int w = 0, h = 0, c = 0;
    read_pfm(path, data, w, h, c);
    ImageRgb out(w, h);
    if (c == 3) {
        out.data = std::move(data);
    } else {
        for (std::size_t i = 0; i < data.size(); ++i) {
            out.data[i * 3 + 0] = data[i];
            out.data[i * 3 + 1] = data[i];
            out.data[i * 3 + 2] = data[i];
        }
    }
    return out;
}

// --- PNG -----------------------------------------------------------------

namespace {

std::uint8_t quantize(double v) {
    const double clamped = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(clamped * 255.0));
}

struct PngWriteCtx {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* file = nullptr;

    ~PngWriteCtx() {
        if (png) {
            png_destroy_write_struct(&png, info ? &info : nullptr);
        }
        if (file) {
            std::fclose(file);
        }
    }
};

void write_png_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes,
                     int width, int height, int color_type) {
    PngWriteCtx ctx;
    ctx.file = std::fopen(path.c_str(), "wb");
    if (!ctx.file) {
        throw IoError("save_png: cannot open " + path + " for writing");
    }
    ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    ctx.info = ctx.png ? png_create_info_struct(ctx.png) : nullptr;
    if (!ctx.png || !ctx.info || setjmp(png_jmpbuf(ctx.png))) {
        throw IoError("save_png: libpng failure writing " + path);
    }
    png_init_io(ctx.png, ctx.file);
    png_set_IHDR(ctx.png, ctx.info, width, height, 8, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(ctx.png, ctx.info);
    const int stride = color_type == PNG_COLOR_TYPE_RGB ? 3 * width : width;
    for (int y = 0; y < height; ++y) {
        png_write_row(ctx.png, const_cast<png_bytep>(bytes.data() +
                                                     static_cast<std::size_t>(y) * stride));
    }
    png_write_end(ctx.png, nullptr);
}

struct PngReadCtx {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* file = nullptr;

    ~PngReadCtx() {
        if (png) {
            png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        }
        if (file) {
            std::fclose(file);
        }
    }
};

/// Reads any PNG normalized to 8-bit RGB.
void read_png_rgb8(const std::string& path, std::vector<std::uint8_t>& out,
                   int& width, int& height) {
    PngReadCtx ctx;
    ctx.file = std::fopen(path.c_str(), "rb");
    if (!ctx.file) {
        throw IoError("load_png: cannot open " + path);
    }
    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    ctx.info = ctx.png ? png_create_info_struct(ctx.png) : nullptr;
    if (!ctx.png || !ctx.info || setjmp(png_jmpbuf(ctx.png))) {
        throw IoError("load_png: libpng failure reading " + path);
    }
    png_init_io(ctx.png, ctx.file);
    png_read_info(ctx.png, ctx.info);

    png_set_expand(ctx.png);          // palette / low-bit gray -> 8-bit
    png_set_strip_16(ctx.png);        // 16-bit -> 8-bit
    png_set_strip_alpha(ctx.png);
    png_set_gray_to_rgb(ctx.png);
    png_read_update_info(ctx.png, ctx.info);

    width = static_cast<int>(png_get_image_width(ctx.png, ctx.info));
    height = static_cast<int>(png_get_image_height(ctx.png, ctx.info));
    if (png_get_rowbytes(ctx.png, ctx.info) != static_cast<std::size_t>(width) * 3) {
        throw ParseError("load_png: unexpected row size in " + path);
    }
    out.assign(static_cast<std::size_t>(width) * height * 3, 0);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) {
        rows[y] = out.data() + static_cast<std::size_t>(y) * width * 3;
    }
    png_read_image(ctx.png, rows.data());
    png_read_end(ctx.png, nullptr);
}

}  // namespace

void save_png(const ImageRgb& image, const std::string& path) {
    std::vector<std::uint8_t> bytes(image.data.size());
    for (std::size_t i = 0; i < image.data.size(); ++i) {
        bytes[i] = quantize(image.data[i]);
    }
    write_png_bytes(path, bytes, image.width, image.height, PNG_COLOR_TYPE_RGB);
}

void save_png(const ImageGray& image, const std::string& path) {
    std::vector<std::uint8_t> bytes(image.data.size());
    for (std::size_t i = 0; i < image.data.size(); ++i) {
        bytes[i] = quantize(image.data[i]);
    }
    write_png_bytes(path, bytes, image.width, image.height, PNG_COLOR_TYPE_GRAY);
}

void save_png(const MaskImage& mask, const std::string& path) {
    std::vector<std::uint8_t> bytes(mask.data.size());
    for (std::size_t i = 0; i < mask.data.size(); ++i) {
        bytes[i] = mask.data[i] ? 255 : 0;
    }
    write_png_bytes(path, bytes, mask.width, mask.height, PNG_COLOR_TYPE_GRAY);
}

ImageRgb load_png_rgb(const std::string& path) {
    std::vector<std::uint8_t> bytes;
    int w = 0, h = 0;
    read_png_rgb8(path, bytes, w, h);
    ImageRgb out(w, h);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        out.data[i] = bytes[i] / 255.0;
    }
    return out;
}

MaskImage load_png_mask(const std::string& path) {
    std::vector<std::uint8_t> bytes;
    int w = 0, h = 0;
    read_png_rgb8(path, bytes, w, h);
    MaskImage out(w, h);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const int lum = bytes[i * 3] + bytes[i * 3 + 1] + bytes[i * 3 + 2];
        out.data[i] = lum > 0 ? 1 : 0;
    }
    return out;
}

}  // namespace kinalign
