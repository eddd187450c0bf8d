#pragma once

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <png.h>

#include "tsmots/core/error.hpp"
#include "tsmots/core/image.hpp"

namespace tsmots::io {

namespace detail {

struct FileHandle {
    std::FILE* f = nullptr;
    explicit FileHandle(const std::string& path, const char* mode) : f(std::fopen(path.c_str(), mode)) {
        if (!f) throw IoError("cannot open " + path);
    }
    ~FileHandle() {
        if (f) std::fclose(f);
    }
    FileHandle(const FileHandle&) = delete;
    FileHandle& operator=(const FileHandle&) = delete;
};

} // namespace detail

inline void write_rgb8_png(const std::string& path, const RgbImage& img) {
    detail::FileHandle fh(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png write failed: " + path);
    }
    png_init_io(png, fh.f);
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = const_cast<png_bytep>(img.data.data() + static_cast<std::size_t>(y) * img.width * 3);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

inline RgbImage read_rgb8_png(const std::string& path) {
    detail::FileHandle fh(path, "rb");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("png read failed: " + path);
    }
    png_init_io(png, fh.f);
    png_read_info(png, info);
    if (png_get_bit_depth(png, info) != 8 || png_get_color_type(png, info) != PNG_COLOR_TYPE_RGB) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("png is not 8-bit RGB: " + path);
    }
    RgbImage img(static_cast<int>(png_get_image_width(png, info)),
                 static_cast<int>(png_get_image_height(png, info)));
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = img.data.data() + static_cast<std::size_t>(y) * img.width * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

/// 16-bit single-channel image (row-major, host byte order in memory).
struct Gray16Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> data;
};

inline void write_gray16_png(const std::string& path, const Gray16Image& img) {
    detail::FileHandle fh(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png write failed: " + path);
    }
    png_init_io(png, fh.f);
    png_set_IHDR(png, info, img.width, img.height, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    // PNG stores 16-bit samples big-endian.
    std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width) * 2);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const std::uint16_t v = img.data[static_cast<std::size_t>(y) * img.width + x];
            row[2 * x] = static_cast<std::uint8_t>(v >> 8);
            row[2 * x + 1] = static_cast<std::uint8_t>(v & 0xff);
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

inline Gray16Image read_gray16_png(const std::string& path) {
    detail::FileHandle fh(path, "rb");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("png read failed: " + path);
    }
    png_init_io(png, fh.f);
    png_read_info(png, info);
    if (png_get_bit_depth(png, info) != 16 || png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("png is not 16-bit gray: " + path);
    }
    Gray16Image img;
    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    img.data.resize(static_cast<std::size_t>(img.width) * img.height);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width) * 2);
    for (int y = 0; y < img.height; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (int x = 0; x < img.width; ++x)
            img.data[static_cast<std::size_t>(y) * img.width + x] =
                static_cast<std::uint16_t>((row[2 * x] << 8) | row[2 * x + 1]);
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

} // namespace tsmots::io
