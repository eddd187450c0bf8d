#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "support/builders.hpp"
#include "tsmots/experiment.hpp"

using namespace tsmots;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("tsmots_exp_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

exp::ExperimentConfig small_config(const std::string& scenario, const fs::path& out) {
    exp::ExperimentConfig cfg;
    cfg.scenario = scenario;
    exp::apply_scenario_preset(cfg);
    exp::apply_config_entry(cfg, "grid.width", "96");
    exp::apply_config_entry(cfg, "grid.height", "96");
    exp::apply_config_entry(cfg, "num_objects", "4");
    exp::apply_config_entry(cfg, "num_frames", "24");
    exp::apply_config_entry(cfg, "arrows.arrow_length", "12");
    exp::apply_config_entry(cfg, "amoeboids.base_radius", "7");
    cfg.output_dir = out;
    return cfg;
}

/// Hash of every regular file under dir except manifests (which carry
/// timestamps).
std::string tree_hash(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file() && e.path().filename() != "manifest.json")
            files.push_back(e.path());
    return io::RunManifest::hash_outputs(files);
}

} // namespace

TEST_CASE("scenario presets expand to the published parameterizations") {
    exp::ExperimentConfig cfg;
    cfg.scenario = "arrows-tr1";
    exp::apply_scenario_preset(cfg);
    CHECK(cfg.arrows.turn_probability == 0.2);
    CHECK(cfg.arrows.signal_period == 4);
    cfg.scenario = "arrows-tr2";
    exp::apply_scenario_preset(cfg);
    CHECK(cfg.arrows.turn_probability == 0.8);
    CHECK(cfg.arrows.signal_period == 2);
    cfg.scenario = "amoeboids-rp20";
    exp::apply_scenario_preset(cfg);
    CHECK(cfg.amoeboids.jitter_divisor == 20.0);
    cfg.scenario = "amoeboids-rp5";
    exp::apply_scenario_preset(cfg);
    CHECK(cfg.amoeboids.jitter_divisor == 5.0);
    cfg.scenario = "amoeboids";
    exp::apply_scenario_preset(cfg);
    CHECK_FALSE(cfg.amoeboids.jitter_enabled());
    cfg.scenario = "nope";
    CHECK_THROWS_AS(exp::apply_scenario_preset(cfg), ConfigError);
}

TEST_CASE("config file parsing") {
    TempDir tmp;
    const auto file = tmp.path / "exp.cfg";
    std::ofstream(file) << "# comment\n"
                        << "scenario = amoeboids-rp5\n"
                        << "trackers = ts, kalman\n"
                        << "seeds = 3, 4, 5\n"
                        << "corruption.dropout_prob = 0.15\n"
                        << "tracker.tr = 3\n"
                        << "amoeboids.jitter_divisor = inf\n";
    exp::ExperimentConfig cfg;
    exp::load_config_file(cfg, file);
    CHECK(cfg.scenario == "amoeboids-rp5");
    CHECK(cfg.trackers == std::vector<TrackerVariant>{TrackerVariant::TS, TrackerVariant::KALMAN});
    CHECK(cfg.seeds == std::vector<std::uint64_t>{3, 4, 5});
    CHECK(cfg.replicates == 3);
    CHECK(cfg.corruption.dropout_prob == 0.15);
    CHECK(cfg.tracker.tr == 3);
    CHECK(cfg.tracker.kalman.max_skip == 6); // follows 2*tr
    CHECK_FALSE(cfg.amoeboids.jitter_enabled());

    std::ofstream(file) << "no_such_key = 1\n";
    exp::ExperimentConfig cfg2;
    CHECK_THROWS_AS(exp::load_config_file(cfg2, file), ConfigError);
}

TEST_CASE("generate is deterministic per seed") {
    TempDir tmp;
    auto cfg = small_config("arrows-tr1", tmp.path / "a");
    cfg.seeds = {7};
    cfg.replicates = 1;
    const auto dirs_a = exp::cmd_generate(cfg);
    cfg.output_dir = tmp.path / "b";
    const auto dirs_b = exp::cmd_generate(cfg);
    REQUIRE(dirs_a.size() == 1);
    CHECK(tree_hash(dirs_a[0]) == tree_hash(dirs_b[0]));

    cfg.seeds = {8};
    cfg.output_dir = tmp.path / "c";
    const auto dirs_c = exp::cmd_generate(cfg);
    CHECK(tree_hash(dirs_a[0]) != tree_hash(dirs_c[0]));
}

TEST_CASE("track stages re-run from persisted inputs bit-identically") {
    TempDir tmp;
    auto cfg = small_config("amoeboids-rp20", tmp.path);
    cfg.seeds = {11};
    cfg.replicates = 1;
    cfg.corruption.dropout_prob = 0.2;
    cfg.corruption.seed = 3;
    cfg.tracker.min_track_length = 2;
    const auto dataset = exp::cmd_generate(cfg)[0];
    const fs::path run = tmp.path / "run";

    exp::cmd_track(cfg, dataset, TrackerVariant::TS, run);
    const auto h_det = io::content_hash(run / "detections.txt");
    const auto h_links = io::content_hash(run / "links.json");
    const auto h_tracks = io::content_hash(run / "tracks.txt");
    const auto h_mots = io::content_hash(run / "tracks_mots.txt");

    // Delete downstream artifacts, re-run single stages from disk.
    fs::remove(run / "tracks.txt");
    fs::remove(run / "tracks_mots.txt");
    exp::cmd_track(cfg, dataset, TrackerVariant::TS, run, exp::TrackStage::tracks);
    CHECK(io::content_hash(run / "tracks.txt") == h_tracks);
    CHECK(io::content_hash(run / "tracks_mots.txt") == h_mots);

    fs::remove(run / "links.json");
    exp::cmd_track(cfg, dataset, TrackerVariant::TS, run, exp::TrackStage::links);
    CHECK(io::content_hash(run / "links.json") == h_links);

    exp::cmd_track(cfg, dataset, TrackerVariant::TS, run, exp::TrackStage::detect);
    CHECK(io::content_hash(run / "detections.txt") == h_det);

    // Full re-run in a fresh directory reproduces everything.
    const fs::path run2 = tmp.path / "run2";
    exp::cmd_track(cfg, dataset, TrackerVariant::TS, run2);
    CHECK(io::content_hash(run2 / "tracks.txt") == h_tracks);
}

TEST_CASE("windows persist with per-offset rle and reload identically") {
    TempDir tmp;
    auto cfg = small_config("arrows", tmp.path);
    cfg.seeds = {13};
    cfg.replicates = 1;
    const auto dataset = exp::cmd_generate(cfg)[0];
    const fs::path run = tmp.path / "run";
    exp::cmd_track(cfg, dataset, TrackerVariant::TS, run);

    const auto windows = io::read_windows_dir(run / "windows");
    REQUIRE_FALSE(windows.empty());
    for (const auto& w : windows) {
        CHECK(static_cast<int>(w.predicted.size()) == 2 * cfg.tracker.tr + 1);
        CHECK_FALSE(w.at_offset(0).empty());
    }
    // Round trip one window through the codec again.
    const auto& w0 = windows.front();
    io::write_window(tmp.path, w0, w0.at_offset(0).grid());
    const auto back =
        io::read_window(tmp.path / io::window_file_name(w0.anchor_frame, w0.anchor_instance));
    CHECK(back.anchor_frame == w0.anchor_frame);
    for (int o = -w0.tr; o <= w0.tr; ++o) CHECK(back.at_offset(o) == w0.at_offset(o));
}

TEST_CASE("evaluate writes csv reports and report aggregates them") {
    TempDir tmp;
    auto cfg = small_config("arrows", tmp.path);
    cfg.seeds = {17, 18};
    cfg.replicates = 2;
    cfg.tracker.min_track_length = 2;
    const auto datasets = exp::cmd_generate(cfg);

    std::vector<fs::path> metric_files;
    for (const auto& ds_dir : datasets) {
        for (auto variant : {TrackerVariant::TS, TrackerVariant::KALMAN}) {
            const fs::path run = ds_dir.parent_path() / to_string(variant);
            exp::cmd_track(cfg, ds_dir, variant, run);
            const auto rep = exp::cmd_evaluate(cfg, ds_dir, run / "tracks.txt",
                                               to_string(variant), run / "report");
            CHECK(rep.assoc.af50 == doctest::Approx(100.0));
            metric_files.push_back(run / "report" / "metrics.csv");
        }
    }
    exp::cmd_report(metric_files, tmp.path / "report");
    REQUIRE(fs::exists(tmp.path / "report" / "summary.csv"));
    REQUIRE(fs::exists(tmp.path / "report" / "kde.csv"));

    // Means in the table equal recomputed means from the per-sequence files.
    std::ifstream in(tmp.path / "report" / "summary.csv");
    std::string line;
    while (std::getline(in, line) && (line.empty() || line[0] == '#')) {} // skip provenance
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        const auto cols = exp::detail::split_list(line);
        REQUIRE(cols.size() == 9);
        const std::string tracker = cols[1];
        double sum = 0.0;
        int n = 0;
        for (const auto& f : metric_files) {
            const auto s = exp::read_metrics_csv(f);
            if (s.tracker != tracker) continue;
            sum += s.scores.at("af50");
            ++n;
        }
        REQUIRE(n == 2);
        CHECK(std::stod(cols[5]) == doctest::Approx(sum / n).epsilon(1e-6));
    }
    CHECK(rows == 2);
}

TEST_CASE("external mots ground truth flows through generate, track and evaluate") {
    TempDir tmp;
    const FrameGrid grid{64, 48};
    const auto gt_file = tmp.path / "gt.txt";
    {
        std::ofstream out(gt_file);
        for (int t = 0; t < 16; ++t) {
            const auto a = builders::rect_mask(grid, 4 + 2 * t, 10, 10 + 2 * t, 18);
            const auto b = builders::rect_mask(grid, 50 - 2 * t, 30, 56 - 2 * t, 38);
            out << format_mots_line({t, 2001, 2, grid, coco_rle_encode(a)}) << "\n";
            out << format_mots_line({t, 2002, 2, grid, coco_rle_encode(b)}) << "\n";
        }
    }
    exp::ExperimentConfig cfg;
    cfg.scenario = "external-mots";
    exp::apply_scenario_preset(cfg);
    exp::apply_config_entry(cfg, "external.file", gt_file.string());
    exp::apply_config_entry(cfg, "external.grid_width", "64");
    exp::apply_config_entry(cfg, "external.grid_height", "48");
    cfg.tracker.min_track_length = 5;
    cfg.output_dir = tmp.path / "exp";

    const auto datasets = exp::cmd_generate(cfg);
    REQUIRE(datasets.size() == 1);
    const fs::path run = datasets[0].parent_path() / "ts";
    exp::cmd_track(cfg, datasets[0], TrackerVariant::TS, run);
    const auto rep = exp::cmd_evaluate(cfg, datasets[0], run / "tracks.txt", "ts", run / "report");
    CHECK(rep.assoc.af50 == doctest::Approx(100.0));
    CHECK(rep.hota.assa == doctest::Approx(100.0));
}

TEST_CASE("cli binary: full pipeline, determinism, and error reporting") {
    TempDir tmp;
    const std::string cli = TSMOTS_CLI;
    const std::string base = tmp.path.string();
    auto run = [&](const std::string& args) {
        return std::system((cli + " " + args + " > " + base + "/stdout.txt 2> " + base +
                            "/stderr.txt")
                               .c_str());
    };
    const auto cfg_file = tmp.path / "exp.cfg";
    std::ofstream(cfg_file) << "grid.width = 96\ngrid.height = 96\nnum_objects = 4\n"
                            << "num_frames = 24\narrows.arrow_length = 12\n"
                            << "tracker.min_track_length = 2\n";

    CHECK(run("generate --scenario arrows --seed 21 --out " + base + "/exp --config " +
              cfg_file.string()) == 0);
    const std::string ds = base + "/exp/arrows/seed_21/dataset";
    CHECK(run("track --dataset " + ds + " --tracker ts --config " + cfg_file.string()) == 0);
    CHECK(run("evaluate --dataset " + ds + " --tracks " + base +
              "/exp/arrows/seed_21/ts/tracks.txt --tracker ts --report-out " + base +
              "/exp/arrows/seed_21/ts/report") == 0);
    CHECK(run("report --metrics " + base + "/exp/arrows/seed_21/ts/report/metrics.csv --out " +
              base + "/exp/report") == 0);
    CHECK(fs::exists(base + "/exp/report/summary.csv"));

    // Same seed into a second tree: identical dataset bytes.
    CHECK(run("generate --scenario arrows --seed 21 --out " + base + "/exp2 --config " +
              cfg_file.string()) == 0);
    CHECK(tree_hash(base + "/exp/arrows/seed_21/dataset") ==
          tree_hash(base + "/exp2/arrows/seed_21/dataset"));

    // Unknown tracker: nonzero exit, machine-readable stderr.
    CHECK(run("track --dataset " + ds + " --tracker nope") != 0);
    std::ifstream err(base + "/stderr.txt");
    std::string err_line;
    std::getline(err, err_line);
    CHECK(err_line.find("{\"error\"") == 0);
}
