#pragma once

#include <vector>

#include "tsmots/core/mask.hpp"

namespace tsmots {

/// A detection to be tracked: its frame, an anonymous id, and its mask.
struct InstanceDetection {
    int frame = 0;
    int instance_id = 0;
    BinaryMask mask;
};

/// Per-detection predicted masks over the frames anchor-tr .. anchor+tr.
/// Slot tr (offset 0) always holds the anchor detection's own mask; other
/// slots may be empty when the object is absent or outside the sequence.
struct LocalTrackWindow {
    int anchor_frame = 0;
    int anchor_instance = 0;
    int tr = 0;
    std::vector<BinaryMask> predicted; // exactly 2*tr + 1 entries

    bool covers(int frame) const {
        return frame >= anchor_frame - tr && frame <= anchor_frame + tr;
    }
    const BinaryMask& at_offset(int offset) const { return predicted[offset + tr]; }
    const BinaryMask& at_frame(int frame) const { return predicted[frame - anchor_frame + tr]; }
};

} // namespace tsmots
