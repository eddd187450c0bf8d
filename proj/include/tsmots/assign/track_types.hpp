#pragma once

#include <vector>

#include "tsmots/core/mask.hpp"
#include "tsmots/trackers/window.hpp"

namespace tsmots {

enum class Provenance { detected, interpolated };

/// Entry of a pre-linking fragment. window_index points into the shared
/// window pool (-1 when the producing tracker has no windows).
struct FragmentEntry {
    int frame = 0;
    BinaryMask mask;
    Provenance provenance = Provenance::detected;
    int window_index = -1;
};

/// Temporally contiguous run of entries under one pre-linking id.
struct TrackFragment {
    int fragment_id = 0;
    std::vector<FragmentEntry> entries;

    int start_frame() const { return entries.front().frame; }
    int end_frame() const { return entries.back().frame; }

    void validate() const {
        if (entries.empty())
            throw InvariantError("fragment: no entries");
        for (std::size_t i = 1; i < entries.size(); ++i)
            if (entries[i].frame != entries[i - 1].frame + 1)
                throw InvariantError("fragment: frames not consecutive");
    }
};

/// Accepted identity match between a fragment ending at frame t and one
/// starting at frame t + offset.
struct IdentityLink {
    int from_fragment = 0;
    int to_fragment = 0;
    int offset = 0;
    double similarity = 0.0;
};

struct TrackEntry {
    int frame = 0;
    BinaryMask mask;
    Provenance provenance = Provenance::detected;
};

/// Final track: one mask per frame over a contiguous span, under a minimal id.
struct Track {
    int track_id = 0;
    std::vector<TrackEntry> entries;

    int start_frame() const { return entries.front().frame; }
    int end_frame() const { return entries.back().frame; }
    int length() const { return static_cast<int>(entries.size()); }
};

} // namespace tsmots
