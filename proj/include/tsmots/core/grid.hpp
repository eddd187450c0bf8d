#pragma once

#include <algorithm>
#include <cstdint>

#include "tsmots/core/error.hpp"

namespace tsmots {

/// Pixel dimensions shared by every frame of a sequence.
struct FrameGrid {
    int width = 0;
    int height = 0;

    friend bool operator==(const FrameGrid&, const FrameGrid&) = default;

    std::uint64_t area() const {
        return static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height);
    }
    /// Shorter grid side; distance-derived defaults (gates, similarity scales) hang off it.
    int fov() const { return std::min(width, height); }
    bool contains(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }
    void validate() const {
        if (width < 1 || height < 1)
            throw ConfigError("FrameGrid: width and height must be >= 1");
    }
};

/// Fractional mask centroid in pixel coordinates (pixel centers at integers).
struct Centroid {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Centroid&, const Centroid&) = default;
};

/// Inclusive, pixel-tight bounding box.
struct BoundingBox {
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;

    std::int64_t area() const {
        return static_cast<std::int64_t>(x_max - x_min + 1) *
               static_cast<std::int64_t>(y_max - y_min + 1);
    }
};

/// IoU of two inclusive pixel boxes.
inline double box_iou(const BoundingBox& a, const BoundingBox& b) {
    const int ix0 = std::max(a.x_min, b.x_min);
    const int iy0 = std::max(a.y_min, b.y_min);
    const int ix1 = std::min(a.x_max, b.x_max);
    const int iy1 = std::min(a.y_max, b.y_max);
    if (ix0 > ix1 || iy0 > iy1) return 0.0;
    const double inter = static_cast<double>(ix1 - ix0 + 1) * static_cast<double>(iy1 - iy0 + 1);
    const double uni = static_cast<double>(a.area()) + static_cast<double>(b.area()) - inter;
    return inter / uni;
}

} // namespace tsmots
