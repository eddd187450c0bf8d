#pragma once

#include <cstdint>
#include <vector>

#include "tsmots/core/grid.hpp"

namespace tsmots {

/// Row-major 8-bit RGB raster.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data; // 3 bytes per pixel

    RgbImage() = default;
    RgbImage(int w, int h, std::uint8_t r = 0, std::uint8_t g = 0, std::uint8_t b = 0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3) {
        for (std::size_t i = 0; i < data.size(); i += 3) {
            data[i] = r;
            data[i + 1] = g;
            data[i + 2] = b;
        }
    }

    void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
        data[i] = r;
        data[i + 1] = g;
        data[i + 2] = b;
    }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

} // namespace tsmots
