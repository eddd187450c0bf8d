#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsmots/core/mask.hpp"

namespace tsmots {

namespace detail {

// Alternating background/foreground pixel counts in column-major scan order,
// starting with a (possibly zero) background count. Sum equals the grid area.
inline std::vector<std::int64_t> mask_to_counts(const BinaryMask& m) {
    std::vector<std::int64_t> counts;
    std::uint64_t pos = 0;
    for (const Run& r : m.runs()) {
        counts.push_back(static_cast<std::int64_t>(r.start - pos));
        counts.push_back(static_cast<std::int64_t>(r.length));
        pos = static_cast<std::uint64_t>(r.start) + r.length;
    }
    const std::uint64_t area = m.grid().area();
    if (counts.empty())
        counts.push_back(static_cast<std::int64_t>(area));
    else if (pos < area)
        counts.push_back(static_cast<std::int64_t>(area - pos));
    return counts;
}

inline BinaryMask counts_to_mask(const std::vector<std::int64_t>& counts, FrameGrid grid) {
    std::vector<Run> runs;
    std::uint64_t pos = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] < 0)
            throw CodecError("rle: negative count");
        if (i % 2 == 1 && counts[i] > 0)
            runs.push_back({static_cast<std::uint32_t>(pos),
                            static_cast<std::uint32_t>(counts[i])});
        pos += static_cast<std::uint64_t>(counts[i]);
        if (pos > grid.area())
            throw CodecError("rle: counts exceed grid area");
    }
    return BinaryMask::from_runs(grid, std::move(runs));
}

} // namespace detail

/// Serializes a mask to the compressed RLE text form used by the MOTS
/// ground-truth files. Counts after the third are delta-encoded against the
/// count two positions back; each value is written little-endian in 6-bit
/// groups (5 data bits, continuation flag in bit 5) offset by ASCII 48.
inline std::string coco_rle_encode(const BinaryMask& m) {
    const std::vector<std::int64_t> counts = detail::mask_to_counts(m);
    std::string s;
    s.reserve(counts.size() * 2);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        std::int64_t x = counts[i];
        if (i > 2) x -= counts[i - 2];
        bool more = true;
        while (more) {
            std::int64_t c = x & 0x1f;
            x >>= 5;
            more = (c & 0x10) ? x != -1 : x != 0;
            if (more) c |= 0x20;
            s.push_back(static_cast<char>(c + 48));
        }
    }
    return s;
}

/// Inverse of coco_rle_encode; rejects malformed strings and counts that
/// overrun the grid.
inline BinaryMask coco_rle_decode(const std::string& s, FrameGrid grid) {
    grid.validate();
    std::vector<std::int64_t> counts;
    std::size_t p = 0;
    while (p < s.size()) {
        std::int64_t x = 0;
        int k = 0;
        bool more = true;
        while (more) {
            if (p >= s.size())
                throw CodecError("rle: truncated value");
            const std::int64_t c = static_cast<std::int64_t>(s[p]) - 48;
            if (c < 0 || c > 63)
                throw CodecError("rle: character out of range");
            x |= (c & 0x1f) << (5 * k);
            more = (c & 0x20) != 0;
            ++p;
            ++k;
            if (!more && (c & 0x10))
                x |= ~std::int64_t{0} << (5 * k);
        }
        if (counts.size() > 2) x += counts[counts.size() - 2];
        counts.push_back(x);
    }
    return detail::counts_to_mask(counts, grid);
}

/// One instance line of a MOTS text file.
struct MotsLine {
    int frame = 0;
    std::int64_t object_id = 0; // class * 1000 + instance in official files
    int class_id = 0;
    FrameGrid grid;
    std::string rle;

    BinaryMask decode_mask() const { return coco_rle_decode(rle, grid); }
};

inline std::string format_mots_line(const MotsLine& l) {
    return std::to_string(l.frame) + " " + std::to_string(l.object_id) + " " +
           std::to_string(l.class_id) + " " + std::to_string(l.grid.height) + " " +
           std::to_string(l.grid.width) + " " + l.rle;
}

inline MotsLine parse_mots_line(const std::string& line) {
    MotsLine l;
    std::size_t pos = 0;
    auto next_token = [&]() -> std::string {
        while (pos < line.size() && line[pos] == ' ') ++pos;
        const std::size_t start = pos;
        while (pos < line.size() && line[pos] != ' ') ++pos;
        if (start == pos)
            throw CodecError("mots line: missing field in '" + line + "'");
        return line.substr(start, pos - start);
    };
    try {
        l.frame = std::stoi(next_token());
        l.object_id = std::stoll(next_token());
        l.class_id = std::stoi(next_token());
        l.grid.height = std::stoi(next_token());
        l.grid.width = std::stoi(next_token());
    } catch (const std::invalid_argument&) {
        throw CodecError("mots line: non-numeric field in '" + line + "'");
    } catch (const std::out_of_range&) {
        throw CodecError("mots line: field out of range in '" + line + "'");
    }
    l.rle = next_token();
    l.grid.validate();
    return l;
}

} // namespace tsmots
