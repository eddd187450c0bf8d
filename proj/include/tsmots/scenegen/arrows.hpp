#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "tsmots/core/rng.hpp"
#include "tsmots/scenegen/scenario.hpp"

namespace tsmots::scenegen {

/// Per-object, per-frame generator state exposed for inspection. `turned`
/// marks frames whose motion direction is the result of a fresh 90-degree
/// turn; `signal_side` is -1 (left), +1 (right) or 0 (not signaling).
struct ArrowsTraceEntry {
    int frame = 0;
    std::uint32_t track_id = 0;
    double heading = 0.0;
    int signal_side = 0;
    bool turned = false;
};

using ArrowsTrace = std::vector<ArrowsTraceEntry>;

namespace detail {

struct ArrowObject {
    std::uint32_t id = 0;
    double x = 0.0, y = 0.0;
    double heading = 0.0;
    double length = 0.0;
    int signal_left = 0;  // frames of signal still to show; turn when it hits 0
    int signal_side = 0;
    int refractory = 0;
    BinaryMask mask;
};

inline BinaryMask raster_arrow(const FrameGrid& g, double cx, double cy, double heading,
                               double length) {
    // Arrow pointing +x in its own frame: shaft rectangle plus triangular head.
    const double half_w = length * 0.125;
    const double head_len = length * 0.4;
    const double head_half_w = length * 0.3;
    const double tail = -length * 0.5;
    const double head_base = length * 0.5 - head_len;
    const double tip = length * 0.5;

    const double c = std::cos(heading), s = std::sin(heading);
    const double reach = length * 0.5 + 1.0;
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - reach)));
    const int x1 = std::min(g.width - 1, static_cast<int>(std::ceil(cx + reach)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - reach)));
    const int y1 = std::min(g.height - 1, static_cast<int>(std::ceil(cy + reach)));

    std::vector<std::pair<int, int>> px;
    for (int x = x0; x <= x1; ++x) {
        for (int y = y0; y <= y1; ++y) {
            const double dx = x - cx, dy = y - cy;
            const double lx = dx * c + dy * s;   // inverse rotation
            const double ly = -dx * s + dy * c;
            const bool in_shaft = lx >= tail && lx <= head_base && std::abs(ly) <= half_w;
            bool in_head = false;
            if (lx >= head_base && lx <= tip) {
                const double t = (tip - lx) / head_len; // 1 at base, 0 at tip
                in_head = std::abs(ly) <= head_half_w * t;
            }
            if (in_shaft || in_head) px.emplace_back(x, y);
        }
    }
    return BinaryMask::from_pixels(g, px);
}

inline bool collides(const BinaryMask& candidate, const std::vector<ArrowObject>& objects,
                     const ArrowObject* self) {
    for (const auto& o : objects)
        if (&o != self && !o.mask.empty() && masks_intersect(candidate, o.mask))
            return true;
    return false;
}

} // namespace detail

/// Generates a Synthetic Arrows sequence. Identical config and seed yield a
/// bit-identical dataset; the optional trace receives per-frame headings and
/// signal states for invariant checks.
inline SequenceDataset generate_arrows(const ArrowsScenarioConfig& cfg,
                                       bool render_frames = true,
                                       ArrowsTrace* trace = nullptr) {
    cfg.validate();
    Rng rng(derive_seed(cfg.seed, 0xa22075));
    SequenceDataset ds;
    ds.grid = cfg.grid;
    ds.scenario_meta = detail::to_json(cfg);
    ds.scenario_meta["generator_version"] = kGeneratorVersion;
    ds.scenario_meta["rendered_frames"] = render_frames;

    const double deg = 3.14159265358979323846 / 180.0;
    const double heading_jitter = 3.0 * deg;

    std::vector<detail::ArrowObject> objects;
    std::uint32_t next_id = 1;

    auto spawn_initial = [&]() {
        for (int i = 0; i < cfg.num_objects; ++i) {
            detail::ArrowObject o;
            o.id = next_id++;
            o.length = cfg.arrow_length * rng.uniform(0.75, 1.25);
            bool placed = false;
            for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
                const double margin = o.length * 0.5 + 2.0;
                o.x = rng.uniform(margin, cfg.grid.width - margin);
                o.y = rng.uniform(margin, cfg.grid.height - margin);
                o.heading = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
                const auto m = detail::raster_arrow(cfg.grid, o.x, o.y, o.heading, o.length);
                if (!m.empty() && !detail::collides(m, objects, nullptr)) {
                    o.mask = m;
                    placed = true;
                }
            }
            if (!placed)
                throw GenerationError("arrows: could not place initial objects");
            objects.push_back(std::move(o));
        }
    };
    spawn_initial();

    // Spawns a replacement entering from a random edge; returns false when no
    // collision-free entry pose was found this frame.
    auto spawn_replacement = [&](detail::ArrowObject& o) {
        o.id = next_id++;
        o.length = cfg.arrow_length * rng.uniform(0.75, 1.25);
        o.signal_left = 0;
        o.signal_side = 0;
        o.refractory = 0;
        for (int attempt = 0; attempt < 100; ++attempt) {
            const int edge = static_cast<int>(rng.uniform_int(0, 3));
            const double along = rng.uniform(0.1, 0.9);
            const double inset = o.length * 0.5 + 1.0;
            double inward;
            switch (edge) {
                case 0: o.x = along * cfg.grid.width; o.y = inset; inward = 0.5 * 3.14159265358979323846; break;
                case 1: o.x = along * cfg.grid.width; o.y = cfg.grid.height - 1 - inset; inward = -0.5 * 3.14159265358979323846; break;
                case 2: o.x = inset; o.y = along * cfg.grid.height; inward = 0.0; break;
                default: o.x = cfg.grid.width - 1 - inset; o.y = along * cfg.grid.height; inward = 3.14159265358979323846; break;
            }
            o.heading = inward + rng.uniform(-0.25 * 3.14159265358979323846,
                                             0.25 * 3.14159265358979323846);
            const auto m = detail::raster_arrow(cfg.grid, o.x, o.y, o.heading, o.length);
            if (!m.empty() && !detail::collides(m, objects, &o)) {
                o.mask = m;
                return true;
            }
        }
        o.mask = BinaryMask(cfg.grid);
        return false;
    };

    std::vector<std::size_t> to_respawn;
    for (int t = 0; t < cfg.num_frames; ++t) {
        if (t > 0) {
            // Replacements for objects that left the field of view last frame.
            for (std::size_t idx : to_respawn)
                spawn_replacement(objects[idx]);
            to_respawn.clear();

            for (std::size_t oi = 0; oi < objects.size(); ++oi) {
                auto& o = objects[oi];
                if (o.mask.empty()) { to_respawn.push_back(oi); continue; }

                bool turned = false;
                if (o.signal_left > 0) {
                    if (--o.signal_left == 0) {
                        o.heading += o.signal_side * 0.5 * 3.14159265358979323846;
                        o.signal_side = 0;
                        o.refractory = 1;
                        turned = true;
                    }
                } else if (o.refractory > 0) {
                    --o.refractory;
                } else if (rng.bernoulli(cfg.turn_probability)) {
                    o.signal_side = rng.bernoulli(0.5) ? -1 : 1;
                    if (cfg.signal_period == 0) {
                        o.heading += o.signal_side * 0.5 * 3.14159265358979323846;
                        o.signal_side = 0;
                        o.refractory = 1;
                        turned = true;
                    } else {
                        o.signal_left = cfg.signal_period;
                    }
                }

                if (!turned)
                    o.heading += rng.uniform(-heading_jitter, heading_jitter);

                bool moved = false;
                double heading = o.heading;
                const int max_tries = turned ? 1 : 8;
                for (int attempt = 0; attempt < max_tries && !moved; ++attempt) {
                    const double nx = o.x + cfg.speed * std::cos(heading);
                    const double ny = o.y + cfg.speed * std::sin(heading);
                    const auto m = detail::raster_arrow(cfg.grid, nx, ny, heading, o.length);
                    if (m.empty()) {
                        // Left the field of view: the track ends here.
                        o.mask = BinaryMask(cfg.grid);
                        to_respawn.push_back(oi);
                        moved = true;
                    } else if (!detail::collides(m, objects, &o)) {
                        o.x = nx;
                        o.y = ny;
                        o.heading = heading;
                        o.mask = m;
                        moved = true;
                    } else if (!turned) {
                        heading = o.heading + rng.uniform(0.5 * 3.14159265358979323846,
                                                          1.5 * 3.14159265358979323846);
                    }
                }
                // All headings blocked: pause in place for one frame.

                if (trace && !o.mask.empty())
                    trace->push_back({t, o.id, o.heading, o.signal_left > 0 ? o.signal_side : 0,
                                      turned});
            }
        } else if (trace) {
            for (const auto& o : objects)
                trace->push_back({0, o.id, o.heading, 0, false});
        }

        FrameMasks fm;
        for (const auto& o : objects)
            if (!o.mask.empty()) fm.emplace(o.id, o.mask);
        ds.gt_masks.push_back(std::move(fm));

        if (render_frames) {
            RgbImage img(cfg.grid.width, cfg.grid.height);
            for (const auto& o : objects) {
                if (o.mask.empty()) continue;
                std::uint8_t r = 255, g = 255, b = 255;
                if (o.signal_left > 0) {
                    if (o.signal_side < 0) { r = 60; g = 90; b = 255; }  // left: blue
                    else { r = 255; g = 70; b = 70; }                    // right: red
                }
                for (const auto& [px, py] : o.mask.pixels()) img.set(px, py, r, g, b);
            }
            ds.frames.push_back(std::move(img));
        }
    }
    return ds;
}

} // namespace tsmots::scenegen
