#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsmots/core/error.hpp"
#include "tsmots/core/image.hpp"
#include "tsmots/core/mask.hpp"

namespace tsmots::scenegen {

inline constexpr const char* kGeneratorVersion = "tsmots-scenegen/1";

/// Moving-arrow scenario parameters. An arrow travels near-linearly; with
/// per-frame probability `turn_probability` it starts signaling (a
/// side-specific fill color) for `signal_period` frames and then performs a
/// 90-degree turn toward the signaled side.
struct ArrowsScenarioConfig {
    FrameGrid grid{512, 512};
    int num_objects = 20;
    int num_frames = 200;
    double speed = 4.0;
    double arrow_length = 24.0;
    double turn_probability = 0.0;
    int signal_period = 4;
    std::uint64_t seed = 1;

    void validate() const {
        grid.validate();
        if (turn_probability < 0.0 || turn_probability > 1.0)
            throw ConfigError("arrows: turn_probability must be in [0, 1]");
        if (signal_period < 0) throw ConfigError("arrows: signal_period must be >= 0");
        if (num_frames < 1) throw ConfigError("arrows: num_frames must be >= 1");
        if (num_objects < 0) throw ConfigError("arrows: num_objects must be >= 0");
        // Longest per-object arrow variant must fit.
        if (arrow_length * 1.25 >= grid.fov())
            throw ConfigError("arrows: arrow does not fit in the grid");
        if (speed < 0.0) throw ConfigError("arrows: speed must be >= 0");
    }
};

/// Blob scenario parameters. Each object is a rigid Perlin-deformed disc;
/// motion is near-linear, and the rendered position of every frame is
/// additionally perturbed per axis by uniform noise in
/// [-fov/jitter_divisor, +fov/jitter_divisor]. An infinite divisor disables
/// the jitter.
struct AmoeboidsScenarioConfig {
    FrameGrid grid{512, 512};
    int num_objects = 20;
    int num_frames = 200;
    double speed = 4.0;
    double base_radius = 16.0;
    int perlin_octaves = 2;
    double perlin_amplitude = 0.5;
    double jitter_divisor = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 1;

    bool jitter_enabled() const { return std::isfinite(jitter_divisor); }

    void validate() const {
        grid.validate();
        if (jitter_enabled() && jitter_divisor <= 1.0)
            throw ConfigError("amoeboids: jitter_divisor must be > 1 or infinite");
        if (num_frames < 1) throw ConfigError("amoeboids: num_frames must be >= 1");
        if (num_objects < 0) throw ConfigError("amoeboids: num_objects must be >= 0");
        if (perlin_octaves < 1) throw ConfigError("amoeboids: perlin_octaves must be >= 1");
        if (perlin_amplitude < 0.0 || perlin_amplitude > 1.0)
            throw ConfigError("amoeboids: perlin_amplitude must be in [0, 1]");
        if (base_radius * (1.0 + perlin_amplitude) * 2.0 >= grid.fov())
            throw ConfigError("amoeboids: blob does not fit in the grid");
        if (speed < 0.0) throw ConfigError("amoeboids: speed must be >= 0");
    }
};

/// Per-frame map from ground-truth track id to its mask.
using FrameMasks = std::map<std::uint32_t, BinaryMask>;

/// One generated or ingested video: frames (optional), per-frame id->mask
/// ground truth, and a metadata echo of how it was produced.
struct SequenceDataset {
    FrameGrid grid;
    std::vector<RgbImage> frames;   // empty when rendering was skipped
    std::vector<FrameMasks> gt_masks;
    nlohmann::json scenario_meta;

    int num_frames() const { return static_cast<int>(gt_masks.size()); }

    friend bool operator==(const SequenceDataset& a, const SequenceDataset& b) {
        return a.grid == b.grid && a.frames == b.frames && a.gt_masks == b.gt_masks &&
               a.scenario_meta == b.scenario_meta;
    }
};

/// Checks the dataset invariants: masks per frame pairwise disjoint and
/// every track id occupying one contiguous frame interval.
inline void validate_dataset(const SequenceDataset& ds) {
    std::map<std::uint32_t, std::pair<int, int>> span; // id -> [first, last]
    std::map<std::uint32_t, int> last_seen;
    for (int t = 0; t < ds.num_frames(); ++t) {
        const auto& fm = ds.gt_masks[t];
        for (auto a = fm.begin(); a != fm.end(); ++a) {
            if (a->second.empty())
                throw InvariantError("dataset: empty ground-truth mask");
            for (auto b = std::next(a); b != fm.end(); ++b)
                if (masks_intersect(a->second, b->second))
                    throw InvariantError("dataset: overlapping ground-truth masks in frame " +
                                         std::to_string(t));
            auto it = last_seen.find(a->first);
            if (it != last_seen.end() && it->second != t - 1)
                throw InvariantError("dataset: track " + std::to_string(a->first) +
                                     " is not temporally contiguous");
            last_seen[a->first] = t;
            auto& s = span.try_emplace(a->first, t, t).first->second;
            s.second = t;
        }
    }
}

namespace detail {

inline nlohmann::json to_json(const ArrowsScenarioConfig& c) {
    return {{"type", "arrows"},
            {"grid", {{"width", c.grid.width}, {"height", c.grid.height}}},
            {"num_objects", c.num_objects},
            {"num_frames", c.num_frames},
            {"speed", c.speed},
            {"arrow_length", c.arrow_length},
            {"turn_probability", c.turn_probability},
            {"signal_period", c.signal_period},
            {"seed", c.seed}};
}

inline nlohmann::json to_json(const AmoeboidsScenarioConfig& c) {
    nlohmann::json j{{"type", "amoeboids"},
                     {"grid", {{"width", c.grid.width}, {"height", c.grid.height}}},
                     {"num_objects", c.num_objects},
                     {"num_frames", c.num_frames},
                     {"speed", c.speed},
                     {"base_radius", c.base_radius},
                     {"perlin_octaves", c.perlin_octaves},
                     {"perlin_amplitude", c.perlin_amplitude},
                     {"seed", c.seed}};
    j["jitter_divisor"] = c.jitter_enabled() ? nlohmann::json(c.jitter_divisor)
                                             : nlohmann::json("inf");
    return j;
}

} // namespace detail

} // namespace tsmots::scenegen
