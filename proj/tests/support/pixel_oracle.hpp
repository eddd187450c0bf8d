#pragma once

// Brute-force pixel-set oracles. These recompute mask geometry by explicit
// enumeration and must stay independent of the run-length implementation
// they are used to check.

#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "tsmots/core/mask.hpp"

namespace oracle {

using PixelSet = std::set<std::pair<int, int>>;

inline PixelSet to_pixel_set(const tsmots::BinaryMask& m) {
    PixelSet s;
    for (int x = 0; x < m.grid().width; ++x)
        for (int y = 0; y < m.grid().height; ++y)
            if (m.contains(x, y)) s.insert({x, y});
    return s;
}

inline double iou(const PixelSet& a, const PixelSet& b) {
    std::size_t inter = 0;
    for (const auto& p : a) inter += b.count(p);
    const std::size_t uni = a.size() + b.size() - inter;
    if (uni == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

inline std::pair<double, double> centroid(const PixelSet& s) {
    double sx = 0.0, sy = 0.0;
    for (const auto& [x, y] : s) {
        sx += x;
        sy += y;
    }
    return {sx / s.size(), sy / s.size()};
}

inline PixelSet translate(const PixelSet& s, int dx, int dy, int width, int height) {
    PixelSet out;
    for (const auto& [x, y] : s) {
        const int nx = x + dx, ny = y + dy;
        if (nx >= 0 && nx < width && ny >= 0 && ny < height) out.insert({nx, ny});
    }
    return out;
}

} // namespace oracle
