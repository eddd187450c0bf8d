#pragma once

#include <map>
#include <vector>

#include "tsmots/assign/hungarian.hpp"
#include "tsmots/assign/similarity.hpp"
#include "tsmots/assign/track_types.hpp"

namespace tsmots {

/// Offset-swept global assignment. For d = 1..2*TR in increasing order,
/// fragments ending at t without an outgoing link are matched against
/// fragments starting at t+d without an incoming link, by Hungarian solve on
/// cost 1 - similarity (infinite below the acceptance threshold). Accepted
/// links are permanent, so lower offsets always win over higher ones.
inline std::vector<IdentityLink> sweep_assign(const std::vector<TrackFragment>& fragments,
                                              const std::vector<LocalTrackWindow>& windows,
                                              int tr, double threshold,
                                              TrackerVariant variant) {
    std::vector<IdentityLink> links;
    if (fragments.empty()) return links;

    const int n = static_cast<int>(fragments.size());
    std::vector<char> has_outgoing(n, 0), has_incoming(n, 0);

    auto last_window = [&](const TrackFragment& f) -> const LocalTrackWindow* {
        const int wi = f.entries.back().window_index;
        return wi >= 0 ? &windows[wi] : nullptr;
    };
    auto first_window = [&](const TrackFragment& f) -> const LocalTrackWindow* {
        const int wi = f.entries.front().window_index;
        return wi >= 0 ? &windows[wi] : nullptr;
    };

    for (int d = 1; d <= 2 * tr; ++d) {
        // Candidate blocks keyed by the ending frame t; pairs across
        // different t cannot have gap d, so blocks are independent.
        std::map<int, std::pair<std::vector<int>, std::vector<int>>> blocks;
        for (int i = 0; i < n; ++i) {
            if (!has_outgoing[i] && last_window(fragments[i]))
                blocks[fragments[i].end_frame()].first.push_back(i);
            if (!has_incoming[i] && first_window(fragments[i]))
                blocks[fragments[i].start_frame() - d].second.push_back(i);
        }
        for (auto& [t, block] : blocks) {
            auto& [ends, starts] = block;
            if (ends.empty() || starts.empty()) continue;

            CostMatrix cost(static_cast<int>(ends.size()), static_cast<int>(starts.size()));
            for (std::size_t i = 0; i < ends.size(); ++i) {
                const auto& fa = fragments[ends[i]];
                for (std::size_t j = 0; j < starts.size(); ++j) {
                    const auto& fb = fragments[starts[j]];
                    double c = kInfiniteCost;
                    // Reject links between temporally overlapping fragments.
                    const bool overlap = fa.start_frame() <= fb.end_frame() &&
                                         fb.start_frame() <= fa.end_frame();
                    if (!overlap) {
                        const double sim =
                            window_similarity(*last_window(fa), *first_window(fb), variant);
                        if (sim >= threshold) c = 1.0 - sim;
                    }
                    cost.at(static_cast<int>(i), static_cast<int>(j)) = c;
                }
            }
            const Assignment a = hungarian(cost);
            for (std::size_t i = 0; i < ends.size(); ++i) {
                const int j = a.row_to_col[i];
                if (j < 0) continue;
                links.push_back({ends[i], starts[j], d, 1.0 - cost.at(static_cast<int>(i), j)});
                has_outgoing[ends[i]] = 1;
                has_incoming[starts[j]] = 1;
            }
        }
    }
    return links;
}

/// Chains of fragment indices connected by identity links, one chain per
/// final track id. Links must form simple paths (<= 1 incoming and outgoing
/// per fragment, no cycles); ids are dense from 0 in order of first
/// appearance (start frame, then fragment id).
inline std::vector<std::vector<int>> reduce_ids(const std::vector<TrackFragment>& fragments,
                                                const std::vector<IdentityLink>& links) {
    const int n = static_cast<int>(fragments.size());
    std::vector<int> next(n, -1), prev(n, -1);
    for (const auto& l : links) {
        if (l.from_fragment < 0 || l.from_fragment >= n || l.to_fragment < 0 ||
            l.to_fragment >= n)
            throw InvariantError("reduce_ids: link references unknown fragment");
        if (next[l.from_fragment] != -1 || prev[l.to_fragment] != -1)
            throw InvariantError("reduce_ids: fragment has more than one link per direction");
        next[l.from_fragment] = l.to_fragment;
        prev[l.to_fragment] = l.from_fragment;
    }

    // Depth-first walk from every head; the degree constraint makes each
    // connected component a simple path.
    std::vector<int> heads;
    for (int i = 0; i < n; ++i)
        if (prev[i] == -1) heads.push_back(i);
    std::sort(heads.begin(), heads.end(), [&](int a, int b) {
        if (fragments[a].start_frame() != fragments[b].start_frame())
            return fragments[a].start_frame() < fragments[b].start_frame();
        return a < b;
    });

    std::vector<char> visited(n, 0);
    std::vector<std::vector<int>> chains;
    for (int head : heads) {
        std::vector<int> chain;
        for (int cur = head; cur != -1; cur = next[cur]) {
            if (visited[cur])
                throw InvariantError("reduce_ids: link graph contains a cycle");
            visited[cur] = 1;
            chain.push_back(cur);
        }
        chains.push_back(std::move(chain));
    }
    for (int i = 0; i < n; ++i)
        if (!visited[i])
            throw InvariantError("reduce_ids: link graph contains a cycle");
    return chains;
}

namespace detail {

// Majority vote of the window predictions covering a gap frame, ties toward
// foreground. With the two boundary windows this is their union when both
// predict, or the single prediction otherwise. Empty when no window predicts.
inline BinaryMask vote_gap_mask(const LocalTrackWindow* wa, const LocalTrackWindow* wb, int frame,
                                const FrameGrid& grid) {
    const BinaryMask* pa = (wa && wa->covers(frame)) ? &wa->at_frame(frame) : nullptr;
    const BinaryMask* pb = (wb && wb->covers(frame)) ? &wb->at_frame(frame) : nullptr;
    if (pa && pa->empty()) pa = nullptr;
    if (pb && pb->empty()) pb = nullptr;
    if (pa && pb) return mask_union(*pa, *pb);
    if (pa) return *pa;
    if (pb) return *pb;
    return BinaryMask(grid);
}

} // namespace detail

/// Assembles one chain of fragments into a final track, reconstructing every
/// gap frame from the boundary windows' predictions (pixel vote), or, when
/// both predict nothing, from a centroid-interpolated translation of the
/// nearest detected mask.
inline Track interpolate_gaps(const std::vector<int>& chain,
                              const std::vector<TrackFragment>& fragments,
                              const std::vector<LocalTrackWindow>& windows, int track_id,
                              const FrameGrid& grid) {
    Track track;
    track.track_id = track_id;
    for (std::size_t ci = 0; ci < chain.size(); ++ci) {
        const TrackFragment& frag = fragments[chain[ci]];
        if (ci > 0) {
            const TrackFragment& prev = fragments[chain[ci - 1]];
            const auto& tail = prev.entries.back();
            const auto& head = frag.entries.front();
            const LocalTrackWindow* wa =
                tail.window_index >= 0 ? &windows[tail.window_index] : nullptr;
            const LocalTrackWindow* wb =
                head.window_index >= 0 ? &windows[head.window_index] : nullptr;
            const int t0 = tail.frame, t1 = head.frame;
            const Centroid c0 = mask_centroid(tail.mask);
            const Centroid c1 = mask_centroid(head.mask);
            for (int f = t0 + 1; f < t1; ++f) {
                BinaryMask m = detail::vote_gap_mask(wa, wb, f, grid);
                if (m.empty()) {
                    // Fallback: drag the nearest detected mask along the
                    // interpolated centroid path.
                    const double a = static_cast<double>(f - t0) / (t1 - t0);
                    const double x = c0.x + a * (c1.x - c0.x);
                    const double y = c0.y + a * (c1.y - c0.y);
                    const bool use_tail = (f - t0) <= (t1 - f);
                    const BinaryMask& src = use_tail ? tail.mask : head.mask;
                    const Centroid cs = use_tail ? c0 : c1;
                    m = mask_translate(src, x - cs.x, y - cs.y);
                    if (m.empty()) m = src;
                }
                track.entries.push_back({f, std::move(m), Provenance::interpolated});
            }
        }
        for (const auto& e : frag.entries)
            track.entries.push_back({e.frame, e.mask, e.provenance});
    }
    return track;
}

/// Drops tracks shorter than min_len frames; survivors are untouched.
inline std::vector<Track> filter_short_tracks(std::vector<Track> tracks, int min_len) {
    std::erase_if(tracks, [&](const Track& t) { return t.length() < min_len; });
    return tracks;
}

} // namespace tsmots
