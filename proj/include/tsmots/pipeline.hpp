#pragma once

#include <vector>

#include "tsmots/assign/sweep.hpp"
#include "tsmots/metrics/report.hpp"
#include "tsmots/trackers/kalman.hpp"
#include "tsmots/trackers/oracle.hpp"

namespace tsmots {

/// All stage outputs of one tracker run, in pipeline order.
struct PipelineResult {
    std::vector<InstanceDetection> detections;
    std::vector<LocalTrackWindow> windows; // empty for the kalman variant
    std::vector<TrackFragment> fragments;
    std::vector<IdentityLink> links;       // empty for the kalman variant
    std::vector<Track> tracks;
};

/// One singleton fragment per detection, carrying its window reference.
inline std::vector<TrackFragment> detections_to_fragments(
    const std::vector<InstanceDetection>& dets) {
    std::vector<TrackFragment> fragments;
    fragments.reserve(dets.size());
    for (std::size_t i = 0; i < dets.size(); ++i) {
        TrackFragment f;
        f.fragment_id = static_cast<int>(i);
        f.entries.push_back({dets[i].frame, dets[i].mask, Provenance::detected,
                             static_cast<int>(i)});
        fragments.push_back(std::move(f));
    }
    return fragments;
}

/// Builds final tracks from linked fragment chains; gap frames are filled by
/// interpolation unless disabled (then tracks simply skip them).
inline std::vector<Track> chains_to_tracks(const std::vector<std::vector<int>>& chains,
                                           const std::vector<TrackFragment>& fragments,
                                           const std::vector<LocalTrackWindow>& windows,
                                           const FrameGrid& grid, bool interpolate) {
    std::vector<Track> tracks;
    tracks.reserve(chains.size());
    for (std::size_t i = 0; i < chains.size(); ++i) {
        if (interpolate) {
            tracks.push_back(
                interpolate_gaps(chains[i], fragments, windows, static_cast<int>(i), grid));
        } else {
            Track t;
            t.track_id = static_cast<int>(i);
            for (int fi : chains[i])
                for (const auto& e : fragments[fi].entries)
                    t.entries.push_back({e.frame, e.mask, e.provenance});
            tracks.push_back(std::move(t));
        }
    }
    return tracks;
}

/// Full tracking pipeline on one sequence: oracle detection, local windows
/// (window variants) or the Kalman forward tracker, offset-swept assignment,
/// id reduction, gap interpolation, short-track filtering.
inline PipelineResult run_tracker(const scenegen::SequenceDataset& ds, const TrackerConfig& cfg,
                                  const OracleCorruption& corr) {
    cfg.validate();
    corr.validate();
    PipelineResult out;
    out.detections = oracle_detect(ds, corr);

    if (cfg.variant == TrackerVariant::KALMAN) {
        KalmanParams params = cfg.kalman;
        if (params.gate_distance <= 0.0) params.gate_distance = ds.grid.fov() / 8.0;
        out.fragments = kalman_track_sequence(out.detections, params);
    } else {
        out.windows.reserve(out.detections.size());
        for (const auto& det : out.detections)
            out.windows.push_back(oracle_local_track(ds, det, cfg.tr, corr));
        out.fragments = detections_to_fragments(out.detections);
        out.links = sweep_assign(out.fragments, out.windows, cfg.tr, cfg.similarity_threshold,
                                 cfg.variant);
    }

    const auto chains = reduce_ids(out.fragments, out.links);
    out.tracks = filter_short_tracks(
        chains_to_tracks(chains, out.fragments, out.windows, ds.grid, cfg.interpolate),
        cfg.min_track_length);
    return out;
}

/// Predicted tracks as per-frame id->mask maps aligned with the dataset.
inline std::vector<scenegen::FrameMasks> tracks_to_frame_masks(const std::vector<Track>& tracks,
                                                               int num_frames) {
    std::vector<scenegen::FrameMasks> out(num_frames);
    for (const auto& tr : tracks)
        for (const auto& e : tr.entries) {
            if (e.mask.empty() || e.frame < 0 || e.frame >= num_frames) continue;
            out[e.frame].emplace(static_cast<std::uint32_t>(tr.track_id), e.mask);
        }
    return out;
}

/// Ground truth re-expressed as final tracks (identity prediction).
inline std::vector<Track> gt_as_tracks(const scenegen::SequenceDataset& ds) {
    std::map<std::uint32_t, Track> by_id;
    for (int t = 0; t < ds.num_frames(); ++t)
        for (const auto& [id, mask] : ds.gt_masks[t]) {
            auto& track = by_id.try_emplace(id).first->second;
            track.track_id = static_cast<int>(id);
            track.entries.push_back({t, mask, Provenance::detected});
        }
    std::vector<Track> out;
    out.reserve(by_id.size());
    for (auto& [id, track] : by_id) out.push_back(std::move(track));
    return out;
}

/// Scores a tracker's final tracks against the dataset's ground truth.
inline MetricReport evaluate_tracks(const scenegen::SequenceDataset& ds,
                                    const std::vector<Track>& tracks) {
    return evaluate_masks(ds.gt_masks, tracks_to_frame_masks(tracks, ds.num_frames()));
}

} // namespace tsmots
