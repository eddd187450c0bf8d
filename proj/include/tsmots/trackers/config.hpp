#pragma once

#include <string>

#include "tsmots/core/error.hpp"

namespace tsmots {

/// Which similarity the assignment stage uses (or the Kalman baseline, which
/// bypasses windows entirely).
enum class TrackerVariant { TS, TS_L2, TS_SHAPE, KALMAN };

inline std::string to_string(TrackerVariant v) {
    switch (v) {
        case TrackerVariant::TS: return "ts";
        case TrackerVariant::TS_L2: return "ts-l2";
        case TrackerVariant::TS_SHAPE: return "ts-shape";
        case TrackerVariant::KALMAN: return "kalman";
    }
    return "?";
}

inline TrackerVariant tracker_variant_from_string(const std::string& s) {
    if (s == "ts") return TrackerVariant::TS;
    if (s == "ts-l2") return TrackerVariant::TS_L2;
    if (s == "ts-shape") return TrackerVariant::TS_SHAPE;
    if (s == "kalman") return TrackerVariant::KALMAN;
    throw ConfigError("unknown tracker '" + s + "'");
}

/// Constant-velocity filter parameters. gate_distance <= 0 selects the
/// default gate of fov/8. max_skip is the maximum assignment distance in
/// frames between the last matched detection and a re-identified one; it
/// mirrors the window trackers' 2*TR reach.
struct KalmanParams {
    double process_noise_scale = 1.0;
    double measurement_noise_scale = 1.0;
    double initial_velocity_variance = 100.0;
    double gate_distance = 0.0;
    int max_skip = 8;

    void validate() const {
        if (process_noise_scale <= 0.0 || measurement_noise_scale <= 0.0 ||
            initial_velocity_variance <= 0.0)
            throw ConfigError("kalman: noise scales must be > 0");
        if (max_skip < 1) throw ConfigError("kalman: max_skip must be >= 1");
    }
};

struct TrackerConfig {
    int tr = 4;
    TrackerVariant variant = TrackerVariant::TS;
    int min_track_length = 10;
    double similarity_threshold = 0.2;
    bool interpolate = true;
    KalmanParams kalman;

    int max_offset() const { return 2 * tr; }

    void validate() const {
        if (tr < 1) throw ConfigError("tracker: tr must be >= 1");
        if (min_track_length < 1) throw ConfigError("tracker: min_track_length must be >= 1");
        if (similarity_threshold < 0.0 || similarity_threshold > 1.0)
            throw ConfigError("tracker: similarity_threshold must be in [0, 1]");
        kalman.validate();
        if (variant == TrackerVariant::KALMAN && kalman.max_skip != max_offset())
            throw ConfigError("tracker: kalman.max_skip must equal the window reach 2*tr");
    }
};

} // namespace tsmots
