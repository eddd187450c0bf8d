#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "tsmots/core/rle.hpp"
#include "tsmots/io/png_io.hpp"
#include "tsmots/scenegen/scenario.hpp"

namespace tsmots::scenegen {

inline constexpr int kDatasetFormatVersion = 1;

namespace detail {

inline std::string frame_name(int t) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06d.png", t);
    return buf;
}

} // namespace detail

/// Writes a dataset as `frames/%06d.png` (8-bit RGB, when rendered),
/// `gt/%06d.png` (16-bit id map, 0 = background) and `meta.json`.
inline void export_dataset(const SequenceDataset& ds, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir / "gt", ec);
    if (ec) throw IoError("cannot create " + (dir / "gt").string());
    const bool have_frames = !ds.frames.empty();
    if (have_frames) {
        fs::create_directories(dir / "frames", ec);
        if (ec) throw IoError("cannot create " + (dir / "frames").string());
    }

    for (int t = 0; t < ds.num_frames(); ++t) {
        io::Gray16Image ids;
        ids.width = ds.grid.width;
        ids.height = ds.grid.height;
        ids.data.assign(ds.grid.area(), 0);
        for (const auto& [id, mask] : ds.gt_masks[t]) {
            if (id > 0xffff)
                throw IoError("export_dataset: track id " + std::to_string(id) +
                              " does not fit the 16-bit id map");
            for (const auto& [x, y] : mask.pixels())
                ids.data[static_cast<std::size_t>(y) * ds.grid.width + x] =
                    static_cast<std::uint16_t>(id);
        }
        io::write_gray16_png((dir / "gt" / detail::frame_name(t)).string(), ids);
        if (have_frames)
            io::write_rgb8_png((dir / "frames" / detail::frame_name(t)).string(), ds.frames[t]);
    }

    nlohmann::json meta{{"format_version", kDatasetFormatVersion},
                        {"grid", {{"width", ds.grid.width}, {"height", ds.grid.height}}},
                        {"num_frames", ds.num_frames()},
                        {"rendered_frames", have_frames},
                        {"scenario", ds.scenario_meta}};
    std::ofstream out(dir / "meta.json");
    if (!out) throw IoError("cannot write " + (dir / "meta.json").string());
    out << meta.dump(2) << "\n";
}

/// Inverse of export_dataset.
inline SequenceDataset import_dataset(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::ifstream in(dir / "meta.json");
    if (!in) throw IoError("cannot read " + (dir / "meta.json").string());
    nlohmann::json meta;
    try {
        in >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed meta.json: " + std::string(e.what()));
    }
    if (!meta.contains("format_version") || meta["format_version"].get<int>() != kDatasetFormatVersion)
        throw IoError("unsupported dataset format version in " + (dir / "meta.json").string());

    SequenceDataset ds;
    ds.grid = FrameGrid{meta["grid"]["width"].get<int>(), meta["grid"]["height"].get<int>()};
    ds.grid.validate();
    ds.scenario_meta = meta["scenario"];
    const int num_frames = meta["num_frames"].get<int>();
    const bool have_frames = meta["rendered_frames"].get<bool>();

    for (int t = 0; t < num_frames; ++t) {
        const auto ids = io::read_gray16_png((dir / "gt" / detail::frame_name(t)).string());
        if (ids.width != ds.grid.width || ids.height != ds.grid.height)
            throw IoError("gt id map has wrong size in frame " + std::to_string(t));
        std::map<std::uint32_t, std::vector<std::pair<int, int>>> pixels;
        for (int y = 0; y < ids.height; ++y)
            for (int x = 0; x < ids.width; ++x) {
                const std::uint16_t id = ids.data[static_cast<std::size_t>(y) * ids.width + x];
                if (id != 0) pixels[id].emplace_back(x, y);
            }
        FrameMasks fm;
        for (auto& [id, px] : pixels)
            fm.emplace(id, BinaryMask::from_pixels(ds.grid, px));
        ds.gt_masks.push_back(std::move(fm));
        if (have_frames)
            ds.frames.push_back(io::read_rgb8_png((dir / "frames" / detail::frame_name(t)).string()));
    }
    return ds;
}

/// Reads a MOTS text ground-truth file (frame object_id class_id h w rle per
/// line) into a masks-only dataset. Ignore-region entries (class 10) are
/// dropped; object ids are preserved as track ids.
inline SequenceDataset import_mots_ground_truth(const std::filesystem::path& file, FrameGrid grid) {
    grid.validate();
    std::ifstream in(file);
    if (!in) throw IoError("cannot read " + file.string());

    SequenceDataset ds;
    ds.grid = grid;
    ds.scenario_meta = {{"type", "external-mots"}, {"source", file.string()}};

    std::string line;
    int max_frame = -1;
    std::vector<MotsLine> entries;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        MotsLine l = parse_mots_line(line);
        if (l.class_id == 10) continue; // ignore regions
        if (!(l.grid == grid))
            throw CodecError("mots gt: line grid " + std::to_string(l.grid.width) + "x" +
                             std::to_string(l.grid.height) + " does not match dataset grid");
        if (l.frame < 0) throw CodecError("mots gt: negative frame id");
        max_frame = std::max(max_frame, l.frame);
        entries.push_back(std::move(l));
    }
    ds.gt_masks.assign(max_frame + 1, FrameMasks{});
    for (const auto& l : entries) {
        auto mask = l.decode_mask();
        if (mask.empty()) continue;
        const auto id = static_cast<std::uint32_t>(l.object_id);
        if (!ds.gt_masks[l.frame].emplace(id, std::move(mask)).second)
            throw CodecError("mots gt: duplicate object id " + std::to_string(l.object_id) +
                             " in frame " + std::to_string(l.frame));
    }
    return ds;
}

/// Writes per-frame id->mask maps as MOTS text lines with the given class id
/// (object_id = class_id * 1000 + track id).
inline void export_mots_text(const std::vector<FrameMasks>& masks, FrameGrid grid, int class_id,
                             const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file.string());
    for (int t = 0; t < static_cast<int>(masks.size()); ++t) {
        for (const auto& [id, mask] : masks[t]) {
            if (id >= 999)
                throw IoError("export_mots_text: track id " + std::to_string(id) +
                              " does not fit the class*1000+instance id scheme");
            MotsLine l{t, static_cast<std::int64_t>(class_id) * 1000 + id, class_id, grid,
                       coco_rle_encode(mask)};
            out << format_mots_line(l) << "\n";
        }
    }
}

} // namespace tsmots::scenegen
