#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "tsmots/core/grid.hpp"

namespace tsmots {

/// One maximal run of foreground pixels in column-major linear order.
struct Run {
    std::uint32_t start = 0;
    std::uint32_t length = 0;

    friend bool operator==(const Run&, const Run&) = default;
};

/// Run-length-encoded single-object binary mask on a fixed grid.
///
/// Pixels are ordered column-major: linear index = x * height + y, so runs
/// may cross column boundaries. Runs are always sorted, non-overlapping and
/// maximally merged; an empty mask (no runs) is valid.
class BinaryMask {
public:
    BinaryMask() = default;
    explicit BinaryMask(FrameGrid grid) : grid_(grid) { grid_.validate(); }

    /// Builds a mask from arbitrary runs; sorts, merges and bounds-checks them.
    static BinaryMask from_runs(FrameGrid grid, std::vector<Run> runs) {
        grid.validate();
        BinaryMask m(grid);
        std::erase_if(runs, [](const Run& r) { return r.length == 0; });
        std::sort(runs.begin(), runs.end(),
                  [](const Run& a, const Run& b) { return a.start < b.start; });
        const std::uint64_t area = grid.area();
        for (const Run& r : runs) {
            const std::uint64_t end = static_cast<std::uint64_t>(r.start) + r.length;
            if (end > area)
                throw CodecError("BinaryMask: run exceeds grid area");
            if (!m.runs_.empty()) {
                Run& last = m.runs_.back();
                const std::uint64_t last_end = static_cast<std::uint64_t>(last.start) + last.length;
                if (r.start < last_end)
                    throw CodecError("BinaryMask: overlapping runs");
                if (r.start == last_end) {
                    last.length += r.length;
                    continue;
                }
            }
            m.runs_.push_back(r);
        }
        return m;
    }

    /// Builds a mask from (x, y) pixel coordinates; out-of-grid pixels are rejected.
    static BinaryMask from_pixels(FrameGrid grid, const std::vector<std::pair<int, int>>& pixels) {
        grid.validate();
        std::vector<std::uint32_t> idx;
        idx.reserve(pixels.size());
        for (const auto& [x, y] : pixels) {
            if (!grid.contains(x, y))
                throw DimensionError("BinaryMask: pixel outside grid");
            idx.push_back(static_cast<std::uint32_t>(x) * grid.height + y);
        }
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
        BinaryMask m(grid);
        for (std::uint32_t i : idx) {
            if (!m.runs_.empty() && m.runs_.back().start + m.runs_.back().length == i)
                ++m.runs_.back().length;
            else
                m.runs_.push_back({i, 1});
        }
        return m;
    }

    const FrameGrid& grid() const { return grid_; }
    const std::vector<Run>& runs() const { return runs_; }
    bool empty() const { return runs_.empty(); }

    std::uint64_t area() const {
        std::uint64_t a = 0;
        for (const Run& r : runs_) a += r.length;
        return a;
    }

    std::vector<std::pair<int, int>> pixels() const {
        std::vector<std::pair<int, int>> out;
        out.reserve(area());
        for (const Run& r : runs_)
            for (std::uint32_t i = r.start; i < r.start + r.length; ++i)
                out.emplace_back(static_cast<int>(i / grid_.height),
                                 static_cast<int>(i % grid_.height));
        return out;
    }

    bool contains(int x, int y) const {
        if (!grid_.contains(x, y)) return false;
        const std::uint32_t idx = static_cast<std::uint32_t>(x) * grid_.height + y;
        auto it = std::upper_bound(runs_.begin(), runs_.end(), idx,
                                   [](std::uint32_t v, const Run& r) { return v < r.start; });
        if (it == runs_.begin()) return false;
        --it;
        return idx < it->start + it->length;
    }

    friend bool operator==(const BinaryMask& a, const BinaryMask& b) {
        return a.grid_ == b.grid_ && a.runs_ == b.runs_;
    }

private:
    FrameGrid grid_{1, 1};
    std::vector<Run> runs_;
};

namespace detail {

// Visits (x, y0..y1) column segments of a run-length mask in order.
template <typename Fn>
inline void for_each_column_segment(const BinaryMask& m, Fn&& fn) {
    const int h = m.grid().height;
    for (const Run& r : m.runs()) {
        std::uint32_t pos = r.start;
        std::uint32_t remaining = r.length;
        while (remaining > 0) {
            const int x = static_cast<int>(pos / h);
            const int y0 = static_cast<int>(pos % h);
            const std::uint32_t in_col = std::min<std::uint32_t>(remaining, h - y0);
            fn(x, y0, y0 + static_cast<int>(in_col) - 1);
            pos += in_col;
            remaining -= in_col;
        }
    }
}

inline void require_same_grid(const BinaryMask& a, const BinaryMask& b, const char* op) {
    if (!(a.grid() == b.grid()))
        throw DimensionError(std::string(op) + ": masks are on different grids");
}

} // namespace detail

/// |a ∩ b| / |a ∪ b|; 0 when both masks are empty.
inline double mask_iou(const BinaryMask& a, const BinaryMask& b) {
    detail::require_same_grid(a, b, "mask_iou");
    std::uint64_t inter = 0;
    const auto& ra = a.runs();
    const auto& rb = b.runs();
    std::size_t i = 0, j = 0;
    while (i < ra.size() && j < rb.size()) {
        const std::uint64_t a0 = ra[i].start, a1 = a0 + ra[i].length;
        const std::uint64_t b0 = rb[j].start, b1 = b0 + rb[j].length;
        const std::uint64_t lo = std::max(a0, b0);
        const std::uint64_t hi = std::min(a1, b1);
        if (lo < hi) inter += hi - lo;
        if (a1 < b1) ++i; else ++j;
    }
    const std::uint64_t uni = a.area() + b.area() - inter;
    if (uni == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

/// True iff the masks share at least one pixel.
inline bool masks_intersect(const BinaryMask& a, const BinaryMask& b) {
    detail::require_same_grid(a, b, "masks_intersect");
    const auto& ra = a.runs();
    const auto& rb = b.runs();
    std::size_t i = 0, j = 0;
    while (i < ra.size() && j < rb.size()) {
        const std::uint64_t a0 = ra[i].start, a1 = a0 + ra[i].length;
        const std::uint64_t b0 = rb[j].start, b1 = b0 + rb[j].length;
        if (std::max(a0, b0) < std::min(a1, b1)) return true;
        if (a1 < b1) ++i; else ++j;
    }
    return false;
}

/// Binary acceptance at the 50% threshold; exactly 0.5 is a rejection.
inline bool mask_iou_50(const BinaryMask& a, const BinaryMask& b) {
    return mask_iou(a, b) > 0.5;
}

/// Pixel-set union of two same-grid masks.
inline BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b) {
    detail::require_same_grid(a, b, "mask_union");
    std::vector<Run> merged;
    merged.reserve(a.runs().size() + b.runs().size());
    std::merge(a.runs().begin(), a.runs().end(), b.runs().begin(), b.runs().end(),
               std::back_inserter(merged),
               [](const Run& x, const Run& y) { return x.start < y.start; });
    std::vector<Run> out;
    for (const Run& r : merged) {
        if (!out.empty()) {
            auto& last = out.back();
            const std::uint64_t last_end = static_cast<std::uint64_t>(last.start) + last.length;
            if (r.start <= last_end) {
                const std::uint64_t r_end = static_cast<std::uint64_t>(r.start) + r.length;
                if (r_end > last_end)
                    last.length = static_cast<std::uint32_t>(r_end - last.start);
                continue;
            }
        }
        out.push_back(r);
    }
    return BinaryMask::from_runs(a.grid(), std::move(out));
}

/// Arithmetic mean of foreground pixel centers.
inline Centroid mask_centroid(const BinaryMask& m) {
    if (m.empty())
        throw EmptyMaskError("mask_centroid: empty mask");
    double sx = 0.0, sy = 0.0;
    std::uint64_t n = 0;
    detail::for_each_column_segment(m, [&](int x, int y0, int y1) {
        const std::uint64_t cnt = static_cast<std::uint64_t>(y1 - y0 + 1);
        sx += static_cast<double>(x) * cnt;
        sy += 0.5 * static_cast<double>(y0 + y1) * cnt;
        n += cnt;
    });
    return {sx / n, sy / n};
}

/// Tight bounding box of the foreground.
inline BoundingBox mask_bbox(const BinaryMask& m) {
    if (m.empty())
        throw EmptyMaskError("mask_bbox: empty mask");
    BoundingBox bb{INT32_MAX, INT32_MAX, INT32_MIN, INT32_MIN};
    detail::for_each_column_segment(m, [&](int x, int y0, int y1) {
        bb.x_min = std::min(bb.x_min, x);
        bb.x_max = std::max(bb.x_max, x);
        bb.y_min = std::min(bb.y_min, y0);
        bb.y_max = std::max(bb.y_max, y1);
    });
    return bb;
}

/// Shifts the foreground by (dx, dy), rounded half away from zero; pixels
/// pushed off the grid are clipped.
inline BinaryMask mask_translate(const BinaryMask& m, double dx, double dy) {
    const int ix = static_cast<int>(std::round(dx));
    const int iy = static_cast<int>(std::round(dy));
    if (ix == 0 && iy == 0) return m;
    const FrameGrid g = m.grid();
    std::vector<Run> out;
    detail::for_each_column_segment(m, [&](int x, int y0, int y1) {
        const int nx = x + ix;
        if (nx < 0 || nx >= g.width) return;
        const int ny0 = std::max(y0 + iy, 0);
        const int ny1 = std::min(y1 + iy, g.height - 1);
        if (ny0 > ny1) return;
        out.push_back({static_cast<std::uint32_t>(nx) * g.height + ny0,
                       static_cast<std::uint32_t>(ny1 - ny0 + 1)});
    });
    return BinaryMask::from_runs(g, std::move(out));
}

} // namespace tsmots
