#pragma once

// On-disk formats for the pipeline stage artifacts: detections, local track
// windows, identity links, final tracks, metric reports and run manifests.
// Every stage reads only these files, so any stage can be re-run in
// isolation and must reproduce its outputs bit for bit.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsmots/assign/track_types.hpp"
#include "tsmots/core/rle.hpp"
#include "tsmots/core/rng.hpp"
#include "tsmots/metrics/kde.hpp"
#include "tsmots/metrics/report.hpp"
#include "tsmots/trackers/window.hpp"

namespace tsmots::io {

namespace fs = std::filesystem;

inline constexpr const char* kToolVersion = "tsmots/0.1.0";

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const fs::path& p, const std::string& content) {
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    out << content;
}

inline std::string content_hash(const fs::path& p) {
    const std::string bytes = read_file(p);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a64(bytes.data(), bytes.size()));
    return buf;
}

// ---- detections ------------------------------------------------------------

/// `frame instance_id class h w rle` per line, plus `#` header comments.
/// Unlike official MOTS files the object id field is the raw anonymous
/// detection id (no class*1000 packing).
inline void write_detections(const fs::path& file, const std::vector<InstanceDetection>& dets,
                             FrameGrid grid, const nlohmann::json& config_echo) {
    std::ostringstream out;
    out << "# tsmots detections v1\n";
    out << "# config " << config_echo.dump() << "\n";
    for (const auto& d : dets)
        out << format_mots_line(
                   {d.frame, d.instance_id, 1, grid, coco_rle_encode(d.mask)})
            << "\n";
    write_file(file, out.str());
}

inline std::vector<InstanceDetection> read_detections(const fs::path& file, FrameGrid grid) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot read " + file.string());
    std::vector<InstanceDetection> dets;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const MotsLine l = parse_mots_line(line);
        if (!(l.grid == grid))
            throw CodecError("detections: grid mismatch in " + file.string());
        dets.push_back({l.frame, static_cast<int>(l.object_id), l.decode_mask()});
    }
    return dets;
}

// ---- local track windows ---------------------------------------------------

inline fs::path window_file_name(int anchor_frame, int anchor_instance) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%06d_%04d.json", anchor_frame, anchor_instance);
    return buf;
}

inline void write_window(const fs::path& dir, const LocalTrackWindow& w, FrameGrid grid,
                         const nlohmann::json& config_echo = {}) {
    nlohmann::json j{{"anchor_frame", w.anchor_frame},
                     {"anchor_instance", w.anchor_instance},
                     {"tr", w.tr},
                     {"grid", {{"width", grid.width}, {"height", grid.height}}}};
    if (!config_echo.is_null()) j["config"] = config_echo;
    auto& preds = j["predicted"] = nlohmann::json::array();
    for (const auto& m : w.predicted) preds.push_back(m.empty() ? "" : coco_rle_encode(m));
    write_file(dir / window_file_name(w.anchor_frame, w.anchor_instance), j.dump() + "\n");
}

inline LocalTrackWindow read_window(const fs::path& file) {
    nlohmann::json j;
    try {
        std::ifstream in(file);
        if (!in) throw IoError("cannot read " + file.string());
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed window file " + file.string() + ": " + e.what());
    }
    LocalTrackWindow w;
    w.anchor_frame = j.at("anchor_frame").get<int>();
    w.anchor_instance = j.at("anchor_instance").get<int>();
    w.tr = j.at("tr").get<int>();
    const FrameGrid grid{j.at("grid").at("width").get<int>(), j.at("grid").at("height").get<int>()};
    for (const auto& s : j.at("predicted")) {
        const auto rle = s.get<std::string>();
        w.predicted.push_back(rle.empty() ? BinaryMask(grid) : coco_rle_decode(rle, grid));
    }
    if (static_cast<int>(w.predicted.size()) != 2 * w.tr + 1)
        throw CodecError("window file has wrong slot count: " + file.string());
    return w;
}

/// Reads a whole windows directory ordered by (anchor frame, instance).
inline std::vector<LocalTrackWindow> read_windows_dir(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<LocalTrackWindow> out;
    out.reserve(files.size());
    for (const auto& f : files) out.push_back(read_window(f));
    return out;
}

// ---- identity links ----------------------------------------------------------

inline void write_links(const fs::path& file, const std::vector<IdentityLink>& links,
                        const nlohmann::json& config_echo) {
    nlohmann::json j{{"config", config_echo}};
    auto& arr = j["links"] = nlohmann::json::array();
    for (const auto& l : links)
        arr.push_back({{"from", l.from_fragment},
                       {"to", l.to_fragment},
                       {"offset", l.offset},
                       {"similarity", l.similarity}});
    write_file(file, j.dump(2) + "\n");
}

inline std::vector<IdentityLink> read_links(const fs::path& file) {
    nlohmann::json j;
    try {
        std::ifstream in(file);
        if (!in) throw IoError("cannot read " + file.string());
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed links file " + file.string() + ": " + e.what());
    }
    std::vector<IdentityLink> links;
    for (const auto& l : j.at("links"))
        links.push_back({l.at("from").get<int>(), l.at("to").get<int>(),
                         l.at("offset").get<int>(), l.at("similarity").get<double>()});
    return links;
}

// ---- final tracks ------------------------------------------------------------

/// One record per track: a `track <id> <start> <end>` line followed by
/// `<frame> <D|I> <rle>` lines (D = detected, I = interpolated).
inline void write_tracks(const fs::path& file, const std::vector<Track>& tracks, FrameGrid grid,
                         const nlohmann::json& config_echo) {
    std::ostringstream out;
    out << "# tsmots tracks v1\n";
    out << "# grid " << grid.width << " " << grid.height << "\n";
    out << "# config " << config_echo.dump() << "\n";
    for (const auto& t : tracks) {
        out << "track " << t.track_id << " " << t.start_frame() << " " << t.end_frame() << "\n";
        for (const auto& e : t.entries)
            out << e.frame << " " << (e.provenance == Provenance::detected ? "D" : "I") << " "
                << coco_rle_encode(e.mask) << "\n";
    }
    write_file(file, out.str());
}

inline std::vector<Track> read_tracks(const fs::path& file, FrameGrid* grid_out = nullptr) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot read " + file.string());
    std::vector<Track> tracks;
    FrameGrid grid{1, 1};
    bool have_grid = false;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# grid ", 0) == 0) {
            std::istringstream ss(line.substr(7));
            ss >> grid.width >> grid.height;
            grid.validate();
            have_grid = true;
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("track ", 0) == 0) {
            Track t;
            std::istringstream ss(line.substr(6));
            int start = 0, end = 0;
            if (!(ss >> t.track_id >> start >> end))
                throw CodecError("tracks: malformed track header '" + line + "'");
            tracks.push_back(std::move(t));
            continue;
        }
        if (!have_grid) throw CodecError("tracks: data before grid header");
        if (tracks.empty()) throw CodecError("tracks: entry before first track record");
        std::istringstream ss(line);
        int frame = 0;
        std::string prov, rle;
        if (!(ss >> frame >> prov >> rle) || (prov != "D" && prov != "I"))
            throw CodecError("tracks: malformed entry '" + line + "'");
        tracks.back().entries.push_back(
            {frame, coco_rle_decode(rle, grid),
             prov == "D" ? Provenance::detected : Provenance::interpolated});
    }
    if (grid_out && have_grid) *grid_out = grid;
    return tracks;
}

// ---- metric report CSVs -------------------------------------------------------

inline std::string score_field(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

inline void write_metrics_csv(const fs::path& file, const std::string& sequence,
                              const std::string& tracker, const MetricReport& r,
                              const nlohmann::json& config_echo) {
    std::ostringstream out;
    out << "# config " << config_echo.dump() << "\n";
    out << "sequence,tracker,ap50,ar50,af50,deta,assa,hota\n";
    out << sequence << "," << tracker << "," << score_field(r.assoc.ap50) << ","
        << score_field(r.assoc.ar50) << "," << score_field(r.assoc.af50) << ","
        << score_field(r.hota.deta) << "," << score_field(r.hota.assa) << ","
        << score_field(r.hota.hota) << "\n";
    write_file(file, out.str());
}

inline void write_frame_counts_csv(const fs::path& file, const MetricReport& r,
                                   const nlohmann::json& config_echo) {
    std::ostringstream out;
    out << "# config " << config_echo.dump() << "\n";
    out << "t,tpa,fpa,fna,gtd,pdd\n";
    for (const auto& c : r.per_frame)
        out << c.t << "," << c.tpa << "," << c.fpa << "," << c.fna << "," << c.gtd << ","
            << c.pdd << "\n";
    write_file(file, out.str());
}

inline void write_hota_alpha_csv(const fs::path& file, const MetricReport& r,
                                 const nlohmann::json& config_echo) {
    std::ostringstream out;
    out << "# config " << config_echo.dump() << "\n";
    out << "alpha,deta,assa,hota\n";
    for (const auto& a : r.hota.per_alpha)
        out << score_field(a.alpha) << "," << score_field(a.deta) << "," << score_field(a.assa)
            << "," << score_field(a.hota) << "\n";
    write_file(file, out.str());
}

// ---- run manifest ---------------------------------------------------------------

/// Per-stage content hashes plus a config echo; re-running a stage from the
/// same inputs must reproduce the same hashes.
class RunManifest {
public:
    RunManifest(fs::path file, nlohmann::json config_echo) : file_(std::move(file)) {
        if (fs::exists(file_)) {
            try {
                std::ifstream in(file_);
                in >> j_;
            } catch (const nlohmann::json::exception&) {
                j_ = nlohmann::json::object();
            }
        }
        j_["tool_version"] = kToolVersion;
        j_["config"] = std::move(config_echo);
    }

    void record_stage(const std::string& stage, const std::vector<fs::path>& outputs) {
        auto& s = j_["stages"][stage];
        s = nlohmann::json::object();
        for (const auto& p : outputs) s[p.filename().string()] = content_hash(p);
        j_["updated"] = static_cast<std::int64_t>(std::time(nullptr));
        write_file(file_, j_.dump(2) + "\n");
    }

    /// Hash of one directory's output files (sorted), for reproducibility checks.
    static std::string hash_outputs(const std::vector<fs::path>& outputs) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        std::vector<fs::path> sorted = outputs;
        std::sort(sorted.begin(), sorted.end());
        for (const auto& p : sorted) {
            const std::string hs = content_hash(p);
            h = fnv1a64(hs.data(), hs.size(), h);
        }
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
        return buf;
    }

private:
    fs::path file_;
    nlohmann::json j_ = nlohmann::json::object();
};

} // namespace tsmots::io
