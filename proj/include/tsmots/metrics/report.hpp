#pragma once

#include <vector>

#include "tsmots/metrics/association.hpp"
#include "tsmots/metrics/hota.hpp"

namespace tsmots {

/// All per-sequence scores: the IoU-50 association family, the HOTA family
/// with its per-alpha breakdown, and the raw per-frame-pair counts.
struct MetricReport {
    AssociationScores assoc;
    HotaScores hota;
    std::vector<AssociationCounts> per_frame;
};

/// Evaluates predicted per-frame masks against ground truth.
inline MetricReport evaluate_masks(const std::vector<scenegen::FrameMasks>& gt,
                                   const std::vector<scenegen::FrameMasks>& pd) {
    MetricReport r;
    const int frames = static_cast<int>(std::max(gt.size(), pd.size()));
    for (int t = 0; t + 1 < frames; ++t)
        r.per_frame.push_back(association_counts(gt, pd, t));
    r.assoc = association_scores(r.per_frame);

    auto to_boxes = [&](const std::vector<scenegen::FrameMasks>& masks) {
        std::vector<FrameBoxes> out;
        out.reserve(masks.size());
        for (const auto& fm : masks) {
            FrameBoxes fb;
            for (const auto& [id, mask] : fm)
                if (!mask.empty()) fb.emplace(id, mask_bbox(mask));
            out.push_back(std::move(fb));
        }
        return out;
    };
    r.hota = hota_family(to_boxes(gt), to_boxes(pd));
    return r;
}

} // namespace tsmots
