#pragma once

#include <cmath>
#include <vector>

#include "tsmots/core/rng.hpp"
#include "tsmots/scenegen/perlin.hpp"
#include "tsmots/scenegen/scenario.hpp"

namespace tsmots::scenegen {

/// Latent (unjittered) and rendered per-frame positions, for jitter-bound checks.
struct AmoeboidsTraceEntry {
    int frame = 0;
    std::uint32_t track_id = 0;
    double latent_x = 0.0, latent_y = 0.0;
    double render_x = 0.0, render_y = 0.0;
};

using AmoeboidsTrace = std::vector<AmoeboidsTraceEntry>;

namespace detail {

struct Blob {
    std::uint32_t id = 0;
    double x = 0.0, y = 0.0; // latent position
    double heading = 0.0;
    std::vector<std::pair<int, int>> shape; // rigid pixel offsets around (0, 0)
    BinaryMask latent_mask;
    BinaryMask render_mask;
    int render_cx = 0, render_cy = 0;
};

// Rigid blob: a disc of base_radius radially displaced by periodic Perlin
// noise, rasterized once as integer offsets.
inline std::vector<std::pair<int, int>> build_blob_shape(double base_radius, double amplitude,
                                                         int octaves, std::uint64_t seed) {
    const PerlinNoise noise(seed);
    const int reach = static_cast<int>(std::ceil(base_radius * (1.0 + amplitude))) + 1;
    std::vector<std::pair<int, int>> shape;
    for (int dx = -reach; dx <= reach; ++dx) {
        for (int dy = -reach; dy <= reach; ++dy) {
            const double rho = std::sqrt(static_cast<double>(dx) * dx + static_cast<double>(dy) * dy);
            const double angle = std::atan2(static_cast<double>(dy), static_cast<double>(dx));
            const double r = base_radius * (1.0 + amplitude * noise.on_circle(angle, octaves));
            if (rho <= r) shape.emplace_back(dx, dy);
        }
    }
    return shape;
}

inline BinaryMask raster_shape(const FrameGrid& g, const std::vector<std::pair<int, int>>& shape,
                               int cx, int cy) {
    std::vector<std::pair<int, int>> px;
    px.reserve(shape.size());
    for (const auto& [dx, dy] : shape) {
        const int x = cx + dx, y = cy + dy;
        if (g.contains(x, y)) px.emplace_back(x, y);
    }
    return BinaryMask::from_pixels(g, px);
}

} // namespace detail

/// Generates a Synthetic Amoeboids sequence: rigid Perlin-shaped blobs with
/// near-linear latent motion (reflecting at the borders, excluding
/// collisions) and optional per-frame uniform positional jitter of the
/// rendered location. Deterministic under config + seed.
inline SequenceDataset generate_amoeboids(const AmoeboidsScenarioConfig& cfg,
                                          bool render_frames = true,
                                          AmoeboidsTrace* trace = nullptr) {
    cfg.validate();
    Rng rng(derive_seed(cfg.seed, 0xa3b01d5));
    SequenceDataset ds;
    ds.grid = cfg.grid;
    ds.scenario_meta = detail::to_json(cfg);
    ds.scenario_meta["generator_version"] = kGeneratorVersion;
    ds.scenario_meta["rendered_frames"] = render_frames;

    const double pi = 3.14159265358979323846;
    const double heading_jitter = 3.0 * pi / 180.0;
    const double shape_reach = cfg.base_radius * (1.0 + cfg.perlin_amplitude) + 1.0;
    const double jitter_max = cfg.jitter_enabled() ? cfg.grid.fov() / cfg.jitter_divisor : 0.0;

    std::vector<detail::Blob> blobs;

    auto latent_collides = [&](const BinaryMask& candidate, const detail::Blob* self) {
        for (const auto& b : blobs)
            if (&b != self && masks_intersect(candidate, b.latent_mask)) return true;
        return false;
    };
    auto render_collides = [&](const BinaryMask& candidate, std::size_t upto) {
        for (std::size_t i = 0; i < upto; ++i)
            if (masks_intersect(candidate, blobs[i].render_mask)) return true;
        return false;
    };

    for (int i = 0; i < cfg.num_objects; ++i) {
        detail::Blob b;
        b.id = static_cast<std::uint32_t>(i + 1);
        b.shape = detail::build_blob_shape(cfg.base_radius, cfg.perlin_amplitude,
                                           cfg.perlin_octaves,
                                           derive_seed(cfg.seed, 0x5a47e, b.id));
        if (b.shape.empty())
            throw GenerationError("amoeboids: degenerate blob shape");
        bool placed = false;
        for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
            b.x = rng.uniform(shape_reach, cfg.grid.width - shape_reach);
            b.y = rng.uniform(shape_reach, cfg.grid.height - shape_reach);
            b.heading = rng.uniform(0.0, 2.0 * pi);
            const auto m = detail::raster_shape(cfg.grid, b.shape,
                                                static_cast<int>(std::lround(b.x)),
                                                static_cast<int>(std::lround(b.y)));
            if (!m.empty() && !latent_collides(m, &b)) {
                b.latent_mask = m;
                placed = true;
            }
        }
        if (!placed)
            throw GenerationError("amoeboids: could not place initial objects");
        blobs.push_back(std::move(b));
    }

    for (int t = 0; t < cfg.num_frames; ++t) {
        if (t > 0) {
            for (auto& b : blobs) {
                b.heading += rng.uniform(-heading_jitter, heading_jitter);
                bool moved = false;
                double heading = b.heading;
                for (int attempt = 0; attempt < 8 && !moved; ++attempt) {
                    double nx = b.x + cfg.speed * std::cos(heading);
                    double ny = b.y + cfg.speed * std::sin(heading);
                    // Reflect at a margin so the latent mask never clips.
                    if (nx < shape_reach || nx > cfg.grid.width - 1 - shape_reach) {
                        heading = pi - heading;
                        nx = b.x + cfg.speed * std::cos(heading);
                    }
                    if (ny < shape_reach || ny > cfg.grid.height - 1 - shape_reach) {
                        heading = -heading;
                        ny = b.y + cfg.speed * std::sin(heading);
                    }
                    const auto m = detail::raster_shape(cfg.grid, b.shape,
                                                        static_cast<int>(std::lround(nx)),
                                                        static_cast<int>(std::lround(ny)));
                    if (!m.empty() && !latent_collides(m, &b)) {
                        b.x = nx;
                        b.y = ny;
                        b.heading = heading;
                        b.latent_mask = m;
                        moved = true;
                    } else {
                        heading = b.heading + rng.uniform(0.5 * pi, 1.5 * pi);
                    }
                }
                // When blocked everywhere the blob pauses for one frame.
            }
        }

        // Rendered positions: latent plus per-axis uniform jitter, re-sampled
        // until disjoint from already-rendered blobs this frame.
        for (std::size_t bi = 0; bi < blobs.size(); ++bi) {
            auto& b = blobs[bi];
            auto clamp_cx = [&](double v) {
                return std::clamp(static_cast<int>(std::lround(v)), 0, cfg.grid.width - 1);
            };
            auto clamp_cy = [&](double v) {
                return std::clamp(static_cast<int>(std::lround(v)), 0, cfg.grid.height - 1);
            };
            bool done = false;
            if (!cfg.jitter_enabled()) {
                b.render_cx = clamp_cx(b.x);
                b.render_cy = clamp_cy(b.y);
                b.render_mask = detail::raster_shape(cfg.grid, b.shape, b.render_cx, b.render_cy);
                done = true; // latent collision exclusion already guarantees disjointness
            }
            for (int attempt = 0; attempt < 50 && !done; ++attempt) {
                const double jx = rng.uniform(-jitter_max, jitter_max);
                const double jy = rng.uniform(-jitter_max, jitter_max);
                const int cx = clamp_cx(b.x + jx);
                const int cy = clamp_cy(b.y + jy);
                const auto m = detail::raster_shape(cfg.grid, b.shape, cx, cy);
                if (!m.empty() && !render_collides(m, bi)) {
                    b.render_cx = cx;
                    b.render_cy = cy;
                    b.render_mask = m;
                    done = true;
                }
            }
            if (!done) {
                // Zero jitter, then a deterministic ring scan inside the
                // jitter box, nearest offsets first.
                const int box = static_cast<int>(std::floor(jitter_max));
                for (int radius = 0; radius <= box && !done; ++radius) {
                    for (int dx = -radius; dx <= radius && !done; ++dx) {
                        for (int dy = -radius; dy <= radius && !done; ++dy) {
                            if (std::max(std::abs(dx), std::abs(dy)) != radius) continue;
                            const int cx = clamp_cx(b.x + dx);
                            const int cy = clamp_cy(b.y + dy);
                            const auto m = detail::raster_shape(cfg.grid, b.shape, cx, cy);
                            if (!m.empty() && !render_collides(m, bi)) {
                                b.render_cx = cx;
                                b.render_cy = cy;
                                b.render_mask = m;
                                done = true;
                            }
                        }
                    }
                }
            }
            if (!done)
                throw GenerationError("amoeboids: no collision-free rendered position");
            if (trace)
                trace->push_back({t, b.id, b.x, b.y, static_cast<double>(b.render_cx),
                                  static_cast<double>(b.render_cy)});
        }

        FrameMasks fm;
        for (const auto& b : blobs) fm.emplace(b.id, b.render_mask);
        ds.gt_masks.push_back(std::move(fm));

        if (render_frames) {
            RgbImage img(cfg.grid.width, cfg.grid.height);
            for (const auto& b : blobs) {
                // Stable per-object tint so objects are visually distinct.
                std::uint64_t h = derive_seed(cfg.seed, 0xc0104, b.id);
                const auto r = static_cast<std::uint8_t>(150 + (h & 0x3f));
                const auto g = static_cast<std::uint8_t>(150 + ((h >> 8) & 0x3f));
                const auto bl = static_cast<std::uint8_t>(150 + ((h >> 16) & 0x3f));
                for (const auto& [px, py] : b.render_mask.pixels()) img.set(px, py, r, g, bl);
            }
            ds.frames.push_back(std::move(img));
        }
    }
    return ds;
}

} // namespace tsmots::scenegen
