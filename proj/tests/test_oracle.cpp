#include <doctest.h>

#include "support/builders.hpp"
#include "tsmots/scenegen/amoeboids.hpp"
#include "tsmots/scenegen/arrows.hpp"
#include "tsmots/trackers/oracle.hpp"

using namespace tsmots;
using namespace tsmots::scenegen;

namespace {

SequenceDataset tiny_arrows(std::uint64_t seed, int frames = 30) {
    ArrowsScenarioConfig cfg;
    cfg.grid = {128, 128};
    cfg.num_objects = 4;
    cfg.num_frames = frames;
    cfg.arrow_length = 14.0;
    cfg.seed = seed;
    return generate_arrows(cfg, false);
}

} // namespace

TEST_CASE("oracle_detect: zero corruption reproduces ground truth") {
    const auto ds = tiny_arrows(3);
    const auto dets = oracle_detect(ds, {});
    std::size_t gt_instances = 0;
    for (const auto& fm : ds.gt_masks) gt_instances += fm.size();
    REQUIRE(dets.size() == gt_instances);

    std::size_t i = 0;
    for (int t = 0; t < ds.num_frames(); ++t)
        for (const auto& [id, mask] : ds.gt_masks[t]) {
            CHECK(dets[i].frame == t);
            CHECK(dets[i].mask == mask);
            CHECK(dets[i].instance_id == static_cast<int>(i));
            ++i;
        }
}

TEST_CASE("oracle_detect: full dropout yields nothing") {
    const auto ds = tiny_arrows(4, 10);
    OracleCorruption corr;
    corr.dropout_prob = 1.0;
    CHECK(oracle_detect(ds, corr).empty());
}

TEST_CASE("oracle_detect: dropout rate lands near its nominal value") {
    // Binomial bound over >= 1000 instance-frames.
    const auto ds = tiny_arrows(5, 60);
    std::size_t gt_instances = 0;
    for (const auto& fm : ds.gt_masks) gt_instances += fm.size();

    std::size_t emitted = 0;
    int trials = 0;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        OracleCorruption corr;
        corr.dropout_prob = 0.2;
        corr.seed = seed;
        emitted += oracle_detect(ds, corr).size();
        trials += static_cast<int>(gt_instances);
    }
    REQUIRE(trials >= 1000);
    const double dropped = 1.0 - static_cast<double>(emitted) / trials;
    CHECK(dropped > 0.15);
    CHECK(dropped < 0.25);
}

TEST_CASE("oracle_detect: boundary noise never empties a mask and is deterministic") {
    const auto ds = tiny_arrows(6, 20);
    OracleCorruption corr;
    corr.boundary_noise = 2;
    corr.seed = 9;
    const auto a = oracle_detect(ds, corr);
    const auto b = oracle_detect(ds, corr);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK_FALSE(a[i].mask.empty());
        CHECK(a[i].mask == b[i].mask);
    }
    // Dilation contains the source and erosion stays inside it, so the
    // perturbed mask always overlaps its source.
    std::size_t i = 0;
    for (int t = 0; t < ds.num_frames(); ++t)
        for (const auto& [id, mask] : ds.gt_masks[t]) {
            CHECK(mask_iou(a[i].mask, mask) > 0.0);
            ++i;
        }
}

TEST_CASE("oracle_local_track: window equals the gt sub-track without corruption") {
    const auto ds = tiny_arrows(7, 30);
    const auto dets = oracle_detect(ds, {});
    const int tr = 4;
    for (std::size_t i = 0; i < dets.size(); i += 7) {
        const auto& det = dets[i];
        const auto w = oracle_local_track(ds, det, tr, {});
        REQUIRE(static_cast<int>(w.predicted.size()) == 2 * tr + 1);
        CHECK(w.at_offset(0) == det.mask);
        const auto gt_id = tsmots::detail::underlying_gt_id(ds, det);
        REQUIRE(gt_id != 0);
        for (int o = -tr; o <= tr; ++o) {
            const int f = det.frame + o;
            if (f < 0 || f >= ds.num_frames()) {
                CHECK(w.at_offset(o).empty());
                continue;
            }
            const auto it = ds.gt_masks[f].find(gt_id);
            if (it == ds.gt_masks[f].end())
                CHECK(w.at_offset(o).empty());
            else
                CHECK(w.at_offset(o) == it->second);
        }
    }
}

TEST_CASE("oracle_local_track: anchor at frame 0 has empty negative offsets") {
    const auto ds = tiny_arrows(8, 12);
    const auto dets = oracle_detect(ds, {});
    REQUIRE(dets.front().frame == 0);
    const auto w = oracle_local_track(ds, dets.front(), 3, {});
    for (int o = -3; o < 0; ++o) CHECK(w.at_offset(o).empty());
    CHECK_FALSE(w.at_offset(0).empty());
}

TEST_CASE("oracle_local_track: jitter degrades window IoU but keeps it high") {
    AmoeboidsScenarioConfig cfg;
    cfg.grid = {256, 256};
    cfg.num_objects = 6;
    cfg.num_frames = 40;
    cfg.base_radius = 16.0;
    cfg.seed = 12;
    const auto ds = generate_amoeboids(cfg, false);
    OracleCorruption corr;
    corr.prediction_jitter = 2;
    corr.seed = 5;
    const auto dets = oracle_detect(ds, corr);

    double sum = 0.0;
    int count = 0;
    int windows = 0;
    for (std::size_t i = 0; i < dets.size() && windows < 100; i += 3, ++windows) {
        const auto& det = dets[i];
        const auto w = oracle_local_track(ds, det, 4, corr);
        const auto gt_id = tsmots::detail::underlying_gt_id(ds, det);
        for (int o = -4; o <= 4; ++o) {
            if (o == 0) continue;
            const int f = det.frame + o;
            if (f < 0 || f >= ds.num_frames()) continue;
            const auto it = ds.gt_masks[f].find(gt_id);
            if (it == ds.gt_masks[f].end() || w.at_offset(o).empty()) continue;
            sum += mask_iou(w.at_offset(o), it->second);
            ++count;
        }
    }
    REQUIRE(count > 0);
    const double mean_iou = sum / count;
    CHECK(mean_iou < 1.0);
    CHECK(mean_iou > 0.5);
}
