#pragma once

#include <unordered_set>
#include <vector>

#include "tsmots/core/rng.hpp"
#include "tsmots/scenegen/scenario.hpp"
#include "tsmots/trackers/window.hpp"

namespace tsmots {

/// Corruption knobs for the oracle detector/local tracker, the desk-scale
/// stand-in for a trained segmentation-and-local-tracking model. Zero
/// corruption reproduces the ground truth exactly (with anonymized ids).
struct OracleCorruption {
    double dropout_prob = 0.0;   // per (instance, frame) detection drop chance
    int boundary_noise = 0;      // max random dilate/erode radius, pixels
    int prediction_jitter = 0;   // max per-offset window translation, pixels
    std::uint64_t seed = 1;

    void validate() const {
        if (dropout_prob < 0.0 || dropout_prob > 1.0)
            throw ConfigError("oracle: dropout_prob must be in [0, 1]");
        if (boundary_noise < 0 || prediction_jitter < 0)
            throw ConfigError("oracle: noise magnitudes must be >= 0");
    }
};

namespace detail {

inline BinaryMask morph(const BinaryMask& m, int radius, bool dilate) {
    if (radius <= 0 || m.empty()) return m;
    const FrameGrid g = m.grid();
    std::unordered_set<std::uint32_t> fg;
    for (const auto& [x, y] : m.pixels())
        fg.insert(static_cast<std::uint32_t>(x) * g.height + y);
    std::vector<std::pair<int, int>> out;
    if (dilate) {
        std::unordered_set<std::uint32_t> grown;
        for (const auto& [x, y] : m.pixels())
            for (int dx = -radius; dx <= radius; ++dx)
                for (int dy = -radius; dy <= radius; ++dy) {
                    const int nx = x + dx, ny = y + dy;
                    if (g.contains(nx, ny))
                        grown.insert(static_cast<std::uint32_t>(nx) * g.height + ny);
                }
        out.reserve(grown.size());
        for (std::uint32_t i : grown)
            out.emplace_back(static_cast<int>(i / g.height), static_cast<int>(i % g.height));
    } else {
        for (const auto& [x, y] : m.pixels()) {
            bool keep = true;
            for (int dx = -radius; dx <= radius && keep; ++dx)
                for (int dy = -radius; dy <= radius && keep; ++dy) {
                    const int nx = x + dx, ny = y + dy;
                    if (!g.contains(nx, ny) ||
                        !fg.count(static_cast<std::uint32_t>(nx) * g.height + ny))
                        keep = false;
                }
            if (keep) out.emplace_back(x, y);
        }
    }
    return BinaryMask::from_pixels(g, out);
}

/// Random dilation or erosion up to `max_radius`; erosion backs off until the
/// result keeps at least one pixel.
inline BinaryMask boundary_perturb(const BinaryMask& m, int max_radius, Rng& rng) {
    if (max_radius <= 0) return m;
    const int radius = static_cast<int>(rng.uniform_int(0, max_radius));
    const bool dilate = rng.bernoulli(0.5);
    if (radius == 0) return m;
    if (dilate) return morph(m, radius, true);
    for (int r = radius; r >= 1; --r) {
        auto eroded = morph(m, r, false);
        if (!eroded.empty()) return eroded;
    }
    return m;
}

/// Ground-truth object behind a detection: highest-IoU mask in its frame
/// (unique in practice since boundary noise keeps heavy overlap), ties to the
/// lowest id. Returns 0 when the detection overlaps nothing.
inline std::uint32_t underlying_gt_id(const scenegen::SequenceDataset& ds,
                                      const InstanceDetection& det) {
    double best = 0.0;
    std::uint32_t best_id = 0;
    for (const auto& [id, mask] : ds.gt_masks[det.frame]) {
        const double v = mask_iou(mask, det.mask);
        if (v > best) {
            best = v;
            best_id = id;
        }
    }
    return best_id;
}

} // namespace detail

/// Re-emits ground-truth instances as detections with fresh anonymous ids,
/// independently dropping each with dropout_prob and perturbing mask
/// boundaries. Pure function of (dataset, corruption).
inline std::vector<InstanceDetection> oracle_detect(const scenegen::SequenceDataset& ds,
                                                    const OracleCorruption& corr) {
    corr.validate();
    std::vector<InstanceDetection> dets;
    int next_id = 0;
    for (int t = 0; t < ds.num_frames(); ++t) {
        for (const auto& [gt_id, mask] : ds.gt_masks[t]) {
            Rng rng(derive_seed(corr.seed, 0xd409, static_cast<std::uint64_t>(t), gt_id));
            if (corr.dropout_prob > 0.0 && rng.bernoulli(corr.dropout_prob)) continue;
            auto det_mask = detail::boundary_perturb(mask, corr.boundary_noise, rng);
            if (det_mask.empty()) det_mask = mask;
            dets.push_back({t, next_id++, std::move(det_mask)});
        }
    }
    return dets;
}

/// Local track window for one detection: at every offset in [-tr, +tr] the
/// ground-truth mask of the same underlying object (empty when absent or
/// outside the sequence), translated by optional per-offset jitter. Offset 0
/// returns the detection mask unmodified.
inline LocalTrackWindow oracle_local_track(const scenegen::SequenceDataset& ds,
                                           const InstanceDetection& det, int tr,
                                           const OracleCorruption& corr) {
    corr.validate();
    if (tr < 1) throw ConfigError("oracle_local_track: tr must be >= 1");
    LocalTrackWindow w;
    w.anchor_frame = det.frame;
    w.anchor_instance = det.instance_id;
    w.tr = tr;
    w.predicted.assign(2 * tr + 1, BinaryMask(ds.grid));
    w.predicted[tr] = det.mask;

    const std::uint32_t gt_id = detail::underlying_gt_id(ds, det);
    if (gt_id == 0) return w;

    for (int o = -tr; o <= tr; ++o) {
        if (o == 0) continue;
        const int f = det.frame + o;
        if (f < 0 || f >= ds.num_frames()) continue;
        const auto it = ds.gt_masks[f].find(gt_id);
        if (it == ds.gt_masks[f].end()) continue;
        BinaryMask pred = it->second;
        if (corr.prediction_jitter > 0) {
            Rng rng(derive_seed(corr.seed, 0x117e4 + static_cast<std::uint64_t>(det.frame),
                                gt_id, static_cast<std::uint64_t>(o + tr)));
            const auto dx = rng.uniform_int(-corr.prediction_jitter, corr.prediction_jitter);
            const auto dy = rng.uniform_int(-corr.prediction_jitter, corr.prediction_jitter);
            pred = mask_translate(pred, static_cast<double>(dx), static_cast<double>(dy));
        }
        w.predicted[o + tr] = std::move(pred);
    }
    return w;
}

} // namespace tsmots
