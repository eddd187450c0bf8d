#pragma once

#include <cmath>

#include "tsmots/trackers/config.hpp"
#include "tsmots/trackers/window.hpp"

namespace tsmots {

/// Similarity of two local track windows whose anchors are d = b.anchor -
/// a.anchor frames apart, 1 <= d <= 2*TR. Per-frame scores over the
/// overlapping absolute frames are averaged over every frame where at least
/// one side predicts a non-empty mask; frames where exactly one side
/// predicts contribute 0.
///
///   TS        mean IoU of the predicted masks
///   TS_L2     exp(-|c_a - c_b| / sigma), sigma = fov/20 (monotone transform
///             of the centroid L2 distance)
///   TS_SHAPE  IoU after translating both masks to a common centroid
inline double window_similarity(const LocalTrackWindow& a, const LocalTrackWindow& b,
                                TrackerVariant variant) {
    if (a.tr != b.tr)
        throw ConfigError("window_similarity: windows have different temporal radii");
    const int d = b.anchor_frame - a.anchor_frame;
    if (d < 1 || d > 2 * a.tr)
        throw ConfigError("window_similarity: offset " + std::to_string(d) +
                          " outside [1, 2*TR]");
    if (variant == TrackerVariant::KALMAN)
        throw ConfigError("window_similarity: kalman variant has no windows");

    const int lo = b.anchor_frame - b.tr;
    const int hi = a.anchor_frame + a.tr;
    double sum = 0.0;
    int denom = 0;
    for (int f = lo; f <= hi; ++f) {
        const BinaryMask& ma = a.at_frame(f);
        const BinaryMask& mb = b.at_frame(f);
        if (ma.empty() && mb.empty()) continue;
        ++denom;
        if (ma.empty() || mb.empty()) continue; // one-sided prediction scores 0
        switch (variant) {
            case TrackerVariant::TS:
                sum += mask_iou(ma, mb);
                break;
            case TrackerVariant::TS_L2: {
                const Centroid ca = mask_centroid(ma);
                const Centroid cb = mask_centroid(mb);
                const double dist = std::hypot(ca.x - cb.x, ca.y - cb.y);
                const double sigma = ma.grid().fov() / 20.0;
                sum += std::exp(-dist / sigma);
                break;
            }
            case TrackerVariant::TS_SHAPE: {
                // Align both to the grid center; symmetric, so neither mask
                // is preferentially clipped.
                const Centroid ca = mask_centroid(ma);
                const Centroid cb = mask_centroid(mb);
                const double cx = ma.grid().width / 2.0;
                const double cy = ma.grid().height / 2.0;
                sum += mask_iou(mask_translate(ma, cx - ca.x, cy - ca.y),
                                mask_translate(mb, cx - cb.x, cy - cb.y));
                break;
            }
            case TrackerVariant::KALMAN:
                break;
        }
    }
    return denom > 0 ? sum / denom : 0.0;
}

} // namespace tsmots
