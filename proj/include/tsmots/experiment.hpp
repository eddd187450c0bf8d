#pragma once

// Experiment front-end: scenario presets, the key-value config file format,
// and the generate / track / evaluate / report stages operating on disk
// artifacts. The CLI is a thin wrapper around these functions; tests drive
// them directly.

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tsmots/io/artifacts.hpp"
#include "tsmots/pipeline.hpp"
#include "tsmots/scenegen/amoeboids.hpp"
#include "tsmots/scenegen/arrows.hpp"
#include "tsmots/scenegen/dataset_io.hpp"

namespace tsmots::exp {

namespace fs = std::filesystem;

inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"arrows",        "arrows-tr1",
                                                "arrows-tr2",    "amoeboids",
                                                "amoeboids-rp20", "amoeboids-rp5",
                                                "external-mots"};
    return names;
}

/// One experiment: a scenario preset, the tracker grid to run on it, and the
/// corruption/tracker parameters shared by all replicates.
struct ExperimentConfig {
    std::string scenario = "arrows";
    std::vector<TrackerVariant> trackers{TrackerVariant::TS};
    int replicates = 1;
    std::vector<std::uint64_t> seeds{1};
    OracleCorruption corruption;
    TrackerConfig tracker;
    fs::path output_dir = "out";

    // Scenario parameters after preset expansion; scenario-specific config
    // keys override individual fields.
    scenegen::ArrowsScenarioConfig arrows;
    scenegen::AmoeboidsScenarioConfig amoeboids;

    // external-mots scenario inputs.
    fs::path external_mots_file;
    FrameGrid external_grid{1920, 1080};

    void validate() const {
        if (static_cast<int>(seeds.size()) != replicates)
            throw ConfigError("experiment: replicates must equal the number of seeds");
        if (trackers.empty()) throw ConfigError("experiment: no trackers selected");
        corruption.validate();
        tracker.validate();
    }
};

/// Applies the named preset's frozen parameterization.
inline void apply_scenario_preset(ExperimentConfig& cfg) {
    const std::string& s = cfg.scenario;
    if (s == "arrows") {
        cfg.arrows.turn_probability = 0.0;
    } else if (s == "arrows-tr1") {
        cfg.arrows.turn_probability = 0.2;
        cfg.arrows.signal_period = 4;
    } else if (s == "arrows-tr2") {
        cfg.arrows.turn_probability = 0.8;
        cfg.arrows.signal_period = 2;
    } else if (s == "amoeboids") {
        cfg.amoeboids.jitter_divisor = std::numeric_limits<double>::infinity();
    } else if (s == "amoeboids-rp20") {
        cfg.amoeboids.jitter_divisor = 20.0;
    } else if (s == "amoeboids-rp5") {
        cfg.amoeboids.jitter_divisor = 5.0;
    } else if (s == "external-mots") {
        // nothing to expand; dataset comes from a file
    } else {
        throw ConfigError("unknown scenario '" + s + "'");
    }
}

inline bool is_arrows_scenario(const std::string& s) { return s.rfind("arrows", 0) == 0; }

namespace detail {

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config: boolean expected for " + key);
}

inline double parse_double(const std::string& v, const std::string& key) {
    if (v == "inf") return std::numeric_limits<double>::infinity();
    try {
        return std::stod(v);
    } catch (const std::exception&) {
        throw ConfigError("config: number expected for " + key);
    }
}

inline std::int64_t parse_int(const std::string& v, const std::string& key) {
    try {
        return std::stoll(v);
    } catch (const std::exception&) {
        throw ConfigError("config: integer expected for " + key);
    }
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(v);
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

} // namespace detail

/// Applies one `key = value` pair; keys mirror the config fields
/// (`corruption.dropout_prob`, `tracker.kalman.max_skip`, `arrows.speed`, ...).
inline void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                               const std::string& value) {
    using detail::parse_bool;
    using detail::parse_double;
    using detail::parse_int;
    if (key == "scenario") {
        cfg.scenario = value;
        apply_scenario_preset(cfg);
    } else if (key == "trackers") {
        cfg.trackers.clear();
        for (const auto& name : detail::split_list(value))
            cfg.trackers.push_back(tracker_variant_from_string(name));
    } else if (key == "replicates") {
        cfg.replicates = static_cast<int>(parse_int(value, key));
    } else if (key == "seeds") {
        cfg.seeds.clear();
        for (const auto& s : detail::split_list(value))
            cfg.seeds.push_back(static_cast<std::uint64_t>(parse_int(s, key)));
        cfg.replicates = static_cast<int>(cfg.seeds.size());
    } else if (key == "output_dir") {
        cfg.output_dir = value;
    } else if (key == "corruption.dropout_prob") {
        cfg.corruption.dropout_prob = parse_double(value, key);
    } else if (key == "corruption.boundary_noise") {
        cfg.corruption.boundary_noise = static_cast<int>(parse_int(value, key));
    } else if (key == "corruption.prediction_jitter") {
        cfg.corruption.prediction_jitter = static_cast<int>(parse_int(value, key));
    } else if (key == "corruption.seed") {
        cfg.corruption.seed = static_cast<std::uint64_t>(parse_int(value, key));
    } else if (key == "tracker.tr") {
        cfg.tracker.tr = static_cast<int>(parse_int(value, key));
        cfg.tracker.kalman.max_skip = cfg.tracker.max_offset();
    } else if (key == "tracker.min_track_length") {
        cfg.tracker.min_track_length = static_cast<int>(parse_int(value, key));
    } else if (key == "tracker.similarity_threshold") {
        cfg.tracker.similarity_threshold = parse_double(value, key);
    } else if (key == "tracker.interpolate") {
        cfg.tracker.interpolate = parse_bool(value, key);
    } else if (key == "tracker.kalman.process_noise_scale") {
        cfg.tracker.kalman.process_noise_scale = parse_double(value, key);
    } else if (key == "tracker.kalman.measurement_noise_scale") {
        cfg.tracker.kalman.measurement_noise_scale = parse_double(value, key);
    } else if (key == "tracker.kalman.initial_velocity_variance") {
        cfg.tracker.kalman.initial_velocity_variance = parse_double(value, key);
    } else if (key == "tracker.kalman.gate_distance") {
        cfg.tracker.kalman.gate_distance = parse_double(value, key);
    } else if (key == "tracker.kalman.max_skip") {
        cfg.tracker.kalman.max_skip = static_cast<int>(parse_int(value, key));
    } else if (key == "grid.width") {
        cfg.arrows.grid.width = cfg.amoeboids.grid.width = static_cast<int>(parse_int(value, key));
    } else if (key == "grid.height") {
        cfg.arrows.grid.height = cfg.amoeboids.grid.height =
            static_cast<int>(parse_int(value, key));
    } else if (key == "num_objects") {
        cfg.arrows.num_objects = cfg.amoeboids.num_objects =
            static_cast<int>(parse_int(value, key));
    } else if (key == "num_frames") {
        cfg.arrows.num_frames = cfg.amoeboids.num_frames = static_cast<int>(parse_int(value, key));
    } else if (key == "speed") {
        cfg.arrows.speed = cfg.amoeboids.speed = parse_double(value, key);
    } else if (key == "arrows.arrow_length") {
        cfg.arrows.arrow_length = parse_double(value, key);
    } else if (key == "arrows.turn_probability") {
        cfg.arrows.turn_probability = parse_double(value, key);
    } else if (key == "arrows.signal_period") {
        cfg.arrows.signal_period = static_cast<int>(parse_int(value, key));
    } else if (key == "amoeboids.base_radius") {
        cfg.amoeboids.base_radius = parse_double(value, key);
    } else if (key == "amoeboids.perlin_octaves") {
        cfg.amoeboids.perlin_octaves = static_cast<int>(parse_int(value, key));
    } else if (key == "amoeboids.perlin_amplitude") {
        cfg.amoeboids.perlin_amplitude = parse_double(value, key);
    } else if (key == "amoeboids.jitter_divisor") {
        cfg.amoeboids.jitter_divisor = parse_double(value, key);
    } else if (key == "external.file") {
        cfg.external_mots_file = value;
    } else if (key == "external.grid_width") {
        cfg.external_grid.width = static_cast<int>(parse_int(value, key));
    } else if (key == "external.grid_height") {
        cfg.external_grid.height = static_cast<int>(parse_int(value, key));
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

/// Loads a `key = value` config file (# comments, blank lines allowed) on
/// top of the given base config.
inline void load_config_file(ExperimentConfig& cfg, const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot read config " + file.string());
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw ConfigError("config: malformed line " + std::to_string(line_no) + " in " +
                                  file.string());
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string{};
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

/// JSON echo of the full expanded config, embedded in every output artifact.
inline nlohmann::json config_echo(const ExperimentConfig& cfg) {
    nlohmann::json trackers = nlohmann::json::array();
    for (auto v : cfg.trackers) trackers.push_back(to_string(v));
    nlohmann::json j{
        {"scenario", cfg.scenario},
        {"trackers", trackers},
        {"replicates", cfg.replicates},
        {"seeds", cfg.seeds},
        {"output_dir", cfg.output_dir.string()},
        {"corruption",
         {{"dropout_prob", cfg.corruption.dropout_prob},
          {"boundary_noise", cfg.corruption.boundary_noise},
          {"prediction_jitter", cfg.corruption.prediction_jitter},
          {"seed", cfg.corruption.seed}}},
        {"tracker",
         {{"tr", cfg.tracker.tr},
          {"min_track_length", cfg.tracker.min_track_length},
          {"similarity_threshold", cfg.tracker.similarity_threshold},
          {"interpolate", cfg.tracker.interpolate},
          {"kalman",
           {{"process_noise_scale", cfg.tracker.kalman.process_noise_scale},
            {"measurement_noise_scale", cfg.tracker.kalman.measurement_noise_scale},
            {"initial_velocity_variance", cfg.tracker.kalman.initial_velocity_variance},
            {"gate_distance", cfg.tracker.kalman.gate_distance},
            {"max_skip", cfg.tracker.kalman.max_skip}}}}}};
    if (is_arrows_scenario(cfg.scenario))
        j["scenario_params"] = scenegen::detail::to_json(cfg.arrows);
    else if (cfg.scenario != "external-mots")
        j["scenario_params"] = scenegen::detail::to_json(cfg.amoeboids);
    return j;
}

// ---- stages -----------------------------------------------------------------

inline fs::path dataset_dir(const ExperimentConfig& cfg, std::uint64_t seed) {
    return cfg.output_dir / cfg.scenario / ("seed_" + std::to_string(seed)) / "dataset";
}

inline fs::path run_dir(const ExperimentConfig& cfg, std::uint64_t seed, TrackerVariant v) {
    return cfg.output_dir / cfg.scenario / ("seed_" + std::to_string(seed)) / to_string(v);
}

template <typename Fn>
void parallel_for(int n, Fn&& fn, int workers = 0);

/// Generates one dataset per replicate seed (or imports the external file)
/// and writes each to disk, replicates on a worker pool. Returns the dataset
/// directories in seed order.
inline std::vector<fs::path> cmd_generate(const ExperimentConfig& cfg, bool render_frames = true) {
    cfg.validate();
    std::vector<fs::path> dirs(cfg.seeds.size());
    std::exception_ptr first_error;
    std::mutex error_mutex;
    parallel_for(static_cast<int>(cfg.seeds.size()), [&](int i) {
        try {
            const std::uint64_t seed = cfg.seeds[i];
            scenegen::SequenceDataset ds;
            if (cfg.scenario == "external-mots") {
                if (cfg.external_mots_file.empty())
                    throw ConfigError("external-mots scenario needs external.file");
                ds = scenegen::import_mots_ground_truth(cfg.external_mots_file, cfg.external_grid);
            } else if (is_arrows_scenario(cfg.scenario)) {
                auto scfg = cfg.arrows;
                scfg.seed = seed;
                ds = scenegen::generate_arrows(scfg, render_frames);
            } else {
                auto scfg = cfg.amoeboids;
                scfg.seed = seed;
                ds = scenegen::generate_amoeboids(scfg, render_frames);
            }
            ds.scenario_meta["preset"] = cfg.scenario;
            const fs::path dir = dataset_dir(cfg, seed);
            scenegen::export_dataset(ds, dir);

            std::vector<fs::path> outputs{dir / "meta.json"};
            for (const auto& e : fs::recursive_directory_iterator(dir))
                if (e.is_regular_file() && e.path().filename() != "meta.json" &&
                    e.path().filename() != "manifest.json")
                    outputs.push_back(e.path());
            io::RunManifest manifest(dir / "manifest.json", config_echo(cfg));
            manifest.record_stage("generate", outputs);
            dirs[i] = dir;
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    });
    if (first_error) std::rethrow_exception(first_error);
    return dirs;
}

/// Sub-stages of cmd_track; "all" runs whichever apply to the tracker.
enum class TrackStage { detect, windows, links, tracks, all };

inline TrackStage track_stage_from_string(const std::string& s) {
    if (s == "detect") return TrackStage::detect;
    if (s == "windows") return TrackStage::windows;
    if (s == "links") return TrackStage::links;
    if (s == "tracks") return TrackStage::tracks;
    if (s == "all") return TrackStage::all;
    throw ConfigError("unknown track stage '" + s + "'");
}

/// Runs the tracking pipeline for one dataset directory, persisting every
/// stage artifact. Each stage reads only the previous stages' files.
inline fs::path cmd_track(const ExperimentConfig& cfg, const fs::path& dataset,
                          TrackerVariant variant, const fs::path& out,
                          TrackStage stage = TrackStage::all) {
    TrackerConfig tcfg = cfg.tracker;
    tcfg.variant = variant;
    tcfg.validate();

    const auto ds = scenegen::import_dataset(dataset);
    const nlohmann::json echo = config_echo(cfg);
    io::RunManifest manifest(out / "manifest.json", echo);
    const bool all = stage == TrackStage::all;

    if (all || stage == TrackStage::detect) {
        const auto dets = oracle_detect(ds, cfg.corruption);
        io::write_detections(out / "detections.txt", dets, ds.grid, echo);
        manifest.record_stage("detect", {out / "detections.txt"});
    }

    const bool uses_windows = variant != TrackerVariant::KALMAN;
    if (uses_windows && (all || stage == TrackStage::windows)) {
        const auto dets = io::read_detections(out / "detections.txt", ds.grid);
        const fs::path wdir = out / "windows";
        std::error_code ec;
        fs::remove_all(wdir, ec);
        std::vector<fs::path> outputs;
        for (const auto& det : dets) {
            const auto w = oracle_local_track(ds, det, tcfg.tr, cfg.corruption);
            io::write_window(wdir, w, ds.grid, echo);
            outputs.push_back(wdir / io::window_file_name(w.anchor_frame, w.anchor_instance));
        }
        manifest.record_stage("windows", outputs);
    }

    if (uses_windows && (all || stage == TrackStage::links)) {
        const auto windows = io::read_windows_dir(out / "windows");
        std::vector<InstanceDetection> dets;
        dets.reserve(windows.size());
        for (const auto& w : windows)
            dets.push_back({w.anchor_frame, w.anchor_instance, w.at_offset(0)});
        const auto fragments = detections_to_fragments(dets);
        const auto links = sweep_assign(fragments, windows, tcfg.tr, tcfg.similarity_threshold,
                                        variant);
        io::write_links(out / "links.json", links, echo);
        manifest.record_stage("links", {out / "links.json"});
    }

    if (all || stage == TrackStage::tracks) {
        std::vector<Track> tracks;
        if (uses_windows) {
            const auto windows = io::read_windows_dir(out / "windows");
            std::vector<InstanceDetection> dets;
            dets.reserve(windows.size());
            for (const auto& w : windows)
                dets.push_back({w.anchor_frame, w.anchor_instance, w.at_offset(0)});
            const auto fragments = detections_to_fragments(dets);
            const auto links = io::read_links(out / "links.json");
            const auto chains = reduce_ids(fragments, links);
            tracks = filter_short_tracks(
                chains_to_tracks(chains, fragments, windows, ds.grid, tcfg.interpolate),
                tcfg.min_track_length);
        } else {
            const auto dets = io::read_detections(out / "detections.txt", ds.grid);
            KalmanParams params = tcfg.kalman;
            if (params.gate_distance <= 0.0) params.gate_distance = ds.grid.fov() / 8.0;
            const auto fragments = kalman_track_sequence(dets, params);
            const auto chains = reduce_ids(fragments, {});
            tracks = filter_short_tracks(
                chains_to_tracks(chains, fragments, {}, ds.grid, tcfg.interpolate),
                tcfg.min_track_length);
        }
        io::write_tracks(out / "tracks.txt", tracks, ds.grid, echo);
        std::vector<scenegen::FrameMasks> pd = tracks_to_frame_masks(tracks, ds.num_frames());
        scenegen::export_mots_text(pd, ds.grid, 1, out / "tracks_mots.txt");
        manifest.record_stage("tracks", {out / "tracks.txt", out / "tracks_mots.txt"});
    }
    return out / "tracks.txt";
}

/// Evaluates a tracks file against a dataset's ground truth, writing the
/// per-sequence metric CSVs. Returns the report.
inline MetricReport cmd_evaluate(const ExperimentConfig& cfg, const fs::path& dataset,
                                 const fs::path& tracks_file, const std::string& tracker_name,
                                 const fs::path& report_dir) {
    const auto ds = scenegen::import_dataset(dataset);
    FrameGrid grid = ds.grid;
    const auto tracks = io::read_tracks(tracks_file, &grid);
    if (!(grid == ds.grid))
        throw DimensionError("evaluate: tracks grid does not match dataset grid");
    const auto report = evaluate_tracks(ds, tracks);

    std::string sequence = dataset.parent_path().filename().string();
    if (ds.scenario_meta.contains("preset"))
        sequence = ds.scenario_meta["preset"].get<std::string>() + "/" + sequence;

    const nlohmann::json echo = config_echo(cfg);
    io::write_metrics_csv(report_dir / "metrics.csv", sequence, tracker_name, report, echo);
    io::write_frame_counts_csv(report_dir / "frame_counts.csv", report, echo);
    io::write_hota_alpha_csv(report_dir / "hota_alpha.csv", report, echo);
    io::RunManifest manifest(report_dir / "manifest.json", echo);
    manifest.record_stage("evaluate", {report_dir / "metrics.csv",
                                       report_dir / "frame_counts.csv",
                                       report_dir / "hota_alpha.csv"});
    return report;
}

// ---- report aggregation -------------------------------------------------------

struct SequenceScores {
    std::string sequence;
    std::string scenario;
    std::string tracker;
    std::map<std::string, double> scores; // metric -> value (may be NaN)
};

/// Parses one metrics.csv written by cmd_evaluate.
inline SequenceScores read_metrics_csv(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot read " + file.string());
    std::string line, header;
    while (std::getline(in, line) && (line.empty() || line[0] == '#')) {}
    header = line;
    if (header.rfind("sequence,", 0) != 0)
        throw CodecError("metrics csv: bad header in " + file.string());
    if (!std::getline(in, line))
        throw CodecError("metrics csv: missing data row in " + file.string());
    const auto cols = detail::split_list(header);
    const auto vals = detail::split_list(line);
    if (cols.size() != vals.size())
        throw CodecError("metrics csv: column mismatch in " + file.string());
    SequenceScores s;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] == "sequence") {
            s.sequence = vals[i];
            const auto slash = s.sequence.find('/');
            s.scenario = slash == std::string::npos ? s.sequence : s.sequence.substr(0, slash);
        } else if (cols[i] == "tracker") {
            s.tracker = vals[i];
        } else {
            s.scores[cols[i]] = vals[i] == "nan" ? std::nan("") : std::stod(vals[i]);
        }
    }
    return s;
}

/// Cross-tracker mean table plus per-metric KDE curves over per-sequence
/// scores. Undefined (nan) scores are excluded from both.
inline void cmd_report(const std::vector<fs::path>& metrics_files, const fs::path& out_dir) {
    if (metrics_files.empty()) throw ConfigError("report: no metric files given");
    std::vector<SequenceScores> rows;
    rows.reserve(metrics_files.size());
    for (const auto& f : metrics_files) rows.push_back(read_metrics_csv(f));

    const std::vector<std::string> metric_names{"ap50", "ar50", "af50", "deta", "assa", "hota"};
    for (const auto& r : rows)
        for (const auto& m : metric_names)
            if (!r.scores.count(m))
                throw ConfigError("report: inconsistent metric sets across inputs");

    std::map<std::pair<std::string, std::string>, std::vector<const SequenceScores*>> groups;
    for (const auto& r : rows) groups[{r.scenario, r.tracker}].push_back(&r);

    std::ostringstream sources;
    sources << "# sources";
    for (const auto& f : metrics_files) sources << " " << f.filename().string();
    sources << "\n";
    std::ostringstream summary;
    summary << sources.str();
    summary << "scenario,tracker,sequences";
    for (const auto& m : metric_names) summary << "," << m;
    summary << "\n";
    std::ostringstream kde_csv;
    kde_csv << sources.str();
    kde_csv << "metric,scenario,tracker,x,density\n";

    for (const auto& [key, group] : groups) {
        summary << key.first << "," << key.second << "," << group.size();
        for (const auto& m : metric_names) {
            std::vector<double> vals;
            for (const auto* r : group) {
                const double v = r->scores.at(m);
                if (!std::isnan(v)) vals.push_back(v);
            }
            if (vals.empty()) {
                summary << ",nan";
                continue;
            }
            double mean = 0.0;
            for (double v : vals) mean += v;
            summary << "," << io::score_field(mean / static_cast<double>(vals.size()));
            const auto dist = summarize(vals);
            for (const auto& [x, density] : dist.kde)
                kde_csv << m << "," << key.first << "," << key.second << ","
                        << io::score_field(x) << "," << io::score_field(density) << "\n";
        }
        summary << "\n";
    }
    io::write_file(out_dir / "summary.csv", summary.str());
    io::write_file(out_dir / "kde.csv", kde_csv.str());
}

/// Runs fn(i) for i in [0, n) on a small worker pool; tasks must not share
/// mutable state.
template <typename Fn>
inline void parallel_for(int n, Fn&& fn, int workers) {
    if (workers <= 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::future<void>> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.push_back(std::async(std::launch::async, [&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        }));
    for (auto& f : pool) f.get();
}

} // namespace tsmots::exp
