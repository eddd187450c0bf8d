#pragma once

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "tsmots/core/mask.hpp"
#include "tsmots/scenegen/scenario.hpp"

namespace tsmots {

/// Association counts for the frame pair (t, t+1).
///
/// gtd counts ground-truth ids present at both t and t+1 whose detection
/// succeeded at t (some prediction exceeds IoU 0.5 there); pdd is the mirror
/// for predicted ids. tpa counts (gt, pd) pairs that are IoU-50 matched at
/// both t and t+1; fpa = pdd - tpa and fna = gtd - tpa. Detection success is
/// required at time t only — the formulas are followed literally even though
/// the membership rule is asymmetric in t and t+1.
struct AssociationCounts {
    int t = 0;
    long tpa = 0;
    long fpa = 0;
    long fna = 0;
    long gtd = 0;
    long pdd = 0;
};

namespace detail {

/// Full IoU-50 relation of one frame. With disjoint ground-truth masks a
/// prediction matches at most one gt id, but one gt may in principle exceed
/// 0.5 against several overlapping predictions, so the relation is kept as a
/// pair set rather than a map.
struct FrameMatch {
    std::set<std::pair<std::uint32_t, std::uint32_t>> pairs; // (gt, pd)
    std::set<std::uint32_t> matched_gt;
    std::set<std::uint32_t> matched_pd;
};

inline FrameMatch match_frame(const scenegen::FrameMasks& gt, const scenegen::FrameMasks& pd) {
    FrameMatch fm;
    for (const auto& [gid, gmask] : gt)
        for (const auto& [pid, pmask] : pd)
            if (mask_iou_50(gmask, pmask)) {
                fm.pairs.emplace(gid, pid);
                fm.matched_gt.insert(gid);
                fm.matched_pd.insert(pid);
            }
    return fm;
}

} // namespace detail

inline AssociationCounts association_counts(const std::vector<scenegen::FrameMasks>& gt,
                                            const std::vector<scenegen::FrameMasks>& pd,
                                            int t) {
    const int frames = static_cast<int>(std::max(gt.size(), pd.size()));
    if (t < 0 || t + 1 >= frames)
        throw ConfigError("association_counts: frame pair out of range");
    static const scenegen::FrameMasks kEmpty;
    auto at = [](const std::vector<scenegen::FrameMasks>& v, int f) -> const scenegen::FrameMasks& {
        return f < static_cast<int>(v.size()) ? v[f] : kEmpty;
    };
    const auto& gt0 = at(gt, t);
    const auto& gt1 = at(gt, t + 1);
    const auto& pd0 = at(pd, t);
    const auto& pd1 = at(pd, t + 1);

    const auto m0 = detail::match_frame(gt0, pd0);
    const auto m1 = detail::match_frame(gt1, pd1);

    AssociationCounts c;
    c.t = t;
    for (std::uint32_t gid : m0.matched_gt)
        if (gt1.count(gid)) ++c.gtd;
    for (std::uint32_t pid : m0.matched_pd)
        if (pd1.count(pid)) ++c.pdd;
    // Pairs matched at both frames, at most one per gt and per pd id so the
    // fpa/fna count identities stay non-negative even with overlapping
    // predictions.
    std::set<std::uint32_t> used_gt, used_pd;
    for (const auto& pr : m0.pairs) {
        if (!m1.pairs.count(pr)) continue;
        if (used_gt.count(pr.first) || used_pd.count(pr.second)) continue;
        used_gt.insert(pr.first);
        used_pd.insert(pr.second);
        ++c.tpa;
    }
    c.fpa = c.pdd - c.tpa;
    c.fna = c.gtd - c.tpa;
    return c;
}

/// Aggregated association precision/recall/F-score, scaled to [0, 100].
/// NaN marks scores whose denominator is zero (undefined, excluded from
/// aggregation downstream).
struct AssociationScores {
    double ap50 = std::nan("");
    double ar50 = std::nan("");
    double af50 = std::nan("");
};

inline AssociationScores association_scores(const std::vector<AssociationCounts>& counts) {
    long tpa = 0, fpa = 0, fna = 0;
    for (const auto& c : counts) {
        tpa += c.tpa;
        fpa += c.fpa;
        fna += c.fna;
    }
    AssociationScores s;
    if (tpa + fpa > 0) s.ap50 = 100.0 * tpa / static_cast<double>(tpa + fpa);
    if (tpa + fna > 0) s.ar50 = 100.0 * tpa / static_cast<double>(tpa + fna);
    if (!std::isnan(s.ap50) && !std::isnan(s.ar50))
        s.af50 = (s.ap50 + s.ar50 > 0.0) ? 2.0 * s.ap50 * s.ar50 / (s.ap50 + s.ar50) : 0.0;
    return s;
}

} // namespace tsmots
