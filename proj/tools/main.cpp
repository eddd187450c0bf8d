// Batch front-end: generate | track | evaluate | report subcommands wiring
// the tracking pipeline into reproducible experiments. Errors exit nonzero
// with a single JSON object on stderr.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsmots/experiment.hpp"

namespace fs = std::filesystem;
using namespace tsmots;

namespace {

struct CommonFlags {
    std::string config_file;
    std::string scenario;
    std::string out_dir;
    std::vector<std::uint64_t> seeds;
    int replicates = -1;
    std::uint64_t base_seed = 0;
    bool have_base_seed = false;
};

exp::ExperimentConfig build_config(const CommonFlags& f) {
    exp::ExperimentConfig cfg;
    if (!f.config_file.empty()) exp::load_config_file(cfg, f.config_file);
    if (!f.scenario.empty()) {
        // The flag wins over the config file's scenario choice.
        cfg.scenario = f.scenario;
        exp::apply_scenario_preset(cfg);
    }
    if (!f.out_dir.empty()) cfg.output_dir = f.out_dir;
    if (!f.seeds.empty()) {
        cfg.seeds = f.seeds;
        cfg.replicates = static_cast<int>(f.seeds.size());
    }
    if (f.replicates > 0) {
        cfg.replicates = f.replicates;
        const std::uint64_t base = f.have_base_seed ? f.base_seed
                                   : cfg.seeds.empty() ? 1
                                                       : cfg.seeds.front();
        cfg.seeds.clear();
        for (int i = 0; i < cfg.replicates; ++i) cfg.seeds.push_back(base + i);
    } else if (f.have_base_seed) {
        cfg.seeds = {f.base_seed};
        cfg.replicates = 1;
    }
    return cfg;
}

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_file, "key = value config file overriding preset fields");
    cmd->add_option("--out", f.out_dir, "output directory");
    cmd->add_option("--seed", [&f](const CLI::results_t& res) {
        f.base_seed = std::stoull(res[0]);
        f.have_base_seed = true;
        return true;
    }, "base seed (replicate i uses seed + i)");
    cmd->add_option("--seeds", f.seeds, "explicit replicate seeds")->delimiter(',');
    cmd->add_option("--replicates", f.replicates, "number of replicates");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-symmetric multi-object tracking and segmentation workbench"};
    app.require_subcommand(1);

    CommonFlags gen_flags, trk_flags, eval_flags;

    auto* gen = app.add_subcommand("generate", "generate scenario datasets");
    gen->add_option("--scenario", gen_flags.scenario, "scenario preset")
        ->check(CLI::IsMember(exp::scenario_names()));
    add_common_flags(gen, gen_flags);
    bool no_frames = false;
    gen->add_flag("--no-frames", no_frames, "skip rendering RGB frames");

    auto* trk = app.add_subcommand("track", "run a tracker on generated datasets");
    std::string dataset_dir_opt, tracker_name = "ts", stage_name = "all", track_out;
    trk->add_option("--dataset", dataset_dir_opt, "dataset directory (from generate)")
        ->required();
    trk->add_option("--tracker", tracker_name, "kalman | ts | ts-l2 | ts-shape");
    trk->add_option("--stage", stage_name, "detect | windows | links | tracks | all");
    trk->add_option("--run-out", track_out, "run output directory (default: beside dataset)");
    add_common_flags(trk, trk_flags);

    auto* eval = app.add_subcommand("evaluate", "score a tracks file against ground truth");
    std::string eval_dataset, eval_tracks, eval_out, eval_tracker = "ts";
    eval->add_option("--dataset", eval_dataset, "dataset directory")->required();
    eval->add_option("--tracks", eval_tracks, "tracks.txt produced by track")->required();
    eval->add_option("--tracker", eval_tracker, "tracker name recorded in the report");
    eval->add_option("--report-out", eval_out, "report directory")->required();
    add_common_flags(eval, eval_flags);

    auto* rep = app.add_subcommand("report", "aggregate metric CSVs into tables and KDE curves");
    std::vector<std::string> metric_files;
    std::string report_out;
    rep->add_option("--metrics", metric_files, "metrics.csv files from evaluate")
        ->required()
        ->delimiter(',');
    rep->add_option("--out", report_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            auto cfg = build_config(gen_flags);
            cfg.validate();
            const auto dirs = exp::cmd_generate(cfg, !no_frames);
            for (const auto& d : dirs) std::cout << d.string() << "\n";
        } else if (trk->parsed()) {
            auto cfg = build_config(trk_flags);
            const auto variant = tracker_variant_from_string(tracker_name);
            const fs::path dataset(dataset_dir_opt);
            const fs::path out = track_out.empty()
                                     ? dataset.parent_path() / to_string(variant)
                                     : fs::path(track_out);
            const auto tracks = exp::cmd_track(cfg, dataset, variant, out,
                                               exp::track_stage_from_string(stage_name));
            std::cout << tracks.string() << "\n";
        } else if (eval->parsed()) {
            auto cfg = build_config(eval_flags);
            exp::cmd_evaluate(cfg, eval_dataset, eval_tracks, eval_tracker, eval_out);
            std::cout << (fs::path(eval_out) / "metrics.csv").string() << "\n";
        } else if (rep->parsed()) {
            std::vector<fs::path> files(metric_files.begin(), metric_files.end());
            exp::cmd_report(files, report_out);
            std::cout << (fs::path(report_out) / "summary.csv").string() << "\n";
        }
    } catch (const std::exception& e) {
        nlohmann::json err{{"error", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}
