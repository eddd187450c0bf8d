#include <doctest.h>

#include <cmath>
#include <map>

#include "tsmots/core/rle.hpp"
#include "tsmots/scenegen/amoeboids.hpp"
#include "tsmots/scenegen/arrows.hpp"

using namespace tsmots;
using namespace tsmots::scenegen;

namespace {

ArrowsScenarioConfig small_arrows(std::uint64_t seed) {
    ArrowsScenarioConfig cfg;
    cfg.grid = {128, 128};
    cfg.num_objects = 5;
    cfg.num_frames = 60;
    cfg.speed = 3.0;
    cfg.arrow_length = 14.0;
    cfg.seed = seed;
    return cfg;
}

AmoeboidsScenarioConfig small_amoeboids(std::uint64_t seed) {
    AmoeboidsScenarioConfig cfg;
    cfg.grid = {128, 128};
    cfg.num_objects = 4;
    cfg.num_frames = 40;
    cfg.speed = 3.0;
    cfg.base_radius = 8.0;
    cfg.seed = seed;
    return cfg;
}

std::map<std::uint32_t, std::vector<std::pair<int, Centroid>>> track_centroids(
    const SequenceDataset& ds) {
    std::map<std::uint32_t, std::vector<std::pair<int, Centroid>>> out;
    for (int t = 0; t < ds.num_frames(); ++t)
        for (const auto& [id, mask] : ds.gt_masks[t])
            out[id].emplace_back(t, mask_centroid(mask));
    return out;
}

} // namespace

TEST_CASE("arrows: masks disjoint, tracks contiguous, deterministic") {
    const auto cfg = small_arrows(42);
    const auto ds = generate_arrows(cfg);
    CHECK_NOTHROW(validate_dataset(ds));
    CHECK(ds.num_frames() == cfg.num_frames);
    CHECK(static_cast<int>(ds.frames.size()) == cfg.num_frames);

    const auto ds2 = generate_arrows(cfg);
    CHECK(ds == ds2);

    auto other = cfg;
    other.seed = 43;
    CHECK_FALSE(generate_arrows(other) == ds);
}

TEST_CASE("arrows: zero turn probability gives constant speed") {
    auto cfg = small_arrows(7);
    cfg.num_objects = 3;
    const auto ds = generate_arrows(cfg, false);
    auto clipped = [&](int t, std::uint32_t id) {
        const auto bb = mask_bbox(ds.gt_masks[t].at(id));
        return bb.x_min == 0 || bb.y_min == 0 || bb.x_max == ds.grid.width - 1 ||
               bb.y_max == ds.grid.height - 1;
    };
    for (const auto& [id, cs] : track_centroids(ds)) {
        for (std::size_t i = 1; i < cs.size(); ++i) {
            if (cs[i].first != cs[i - 1].first + 1) continue;
            // Border-clipped masks lose pixels, which drags their centroid.
            if (clipped(cs[i].first, id) || clipped(cs[i - 1].first, id)) continue;
            const double dx = cs[i].second.x - cs[i - 1].second.x;
            const double dy = cs[i].second.y - cs[i - 1].second.y;
            const double step = std::sqrt(dx * dx + dy * dy);
            // Constant up to rasterization; pauses (collision fallback) allowed.
            if (step > 0.1) CHECK(step == doctest::Approx(cfg.speed).epsilon(0.5));
        }
    }
}

TEST_CASE("arrows: signal faithfulness") {
    ArrowsTrace trace;
    auto cfg = small_arrows(11);
    cfg.turn_probability = 0.2;
    cfg.signal_period = 4;
    cfg.num_frames = 80;
    const auto ds = generate_arrows(cfg, true, &trace);

    std::map<std::uint32_t, std::vector<ArrowsTraceEntry>> per_track;
    for (const auto& e : trace) per_track[e.track_id].push_back(e);

    int turns = 0, onsets = 0;
    for (const auto& [id, entries] : per_track) {
        for (std::size_t i = 0; i < entries.size(); ++i) {
            // Every turn is preceded by exactly signal_period signaling frames.
            if (entries[i].turned) {
                ++turns;
                REQUIRE(i >= static_cast<std::size_t>(cfg.signal_period));
                for (int k = 1; k <= cfg.signal_period; ++k)
                    CHECK(entries[i - k].signal_side != 0);
                if (i > static_cast<std::size_t>(cfg.signal_period))
                    CHECK(entries[i - cfg.signal_period - 1].signal_side == 0);
            }
            // Every onset is followed by a turn signal_period frames later,
            // unless the track exits first.
            const bool onset = entries[i].signal_side != 0 &&
                               (i == 0 || entries[i - 1].signal_side == 0);
            if (onset) {
                ++onsets;
                const std::size_t turn_at = i + cfg.signal_period;
                if (turn_at < entries.size()) {
                    CHECK(entries[turn_at].frame == entries[i].frame + cfg.signal_period);
                    CHECK(entries[turn_at].turned);
                }
            }
        }
    }
    CHECK(turns > 3);
    CHECK(onsets >= turns);

    // Signaling frames carry the side-specific fill color somewhere on the mask.
    for (const auto& e : trace) {
        if (e.signal_side == 0) continue;
        const auto& mask = ds.gt_masks[e.frame].at(e.track_id);
        const auto [px, py] = mask.pixels().front();
        const auto& img = ds.frames[e.frame];
        const std::size_t off = (static_cast<std::size_t>(py) * img.width + px) * 3;
        if (e.signal_side < 0)
            CHECK(img.data[off + 2] > img.data[off]); // blue dominates
        else
            CHECK(img.data[off] > img.data[off + 2]); // red dominates
    }
}

TEST_CASE("arrows: turns change heading by exactly 90 degrees") {
    ArrowsTrace trace;
    auto cfg = small_arrows(13);
    cfg.turn_probability = 0.8;
    cfg.signal_period = 2;
    generate_arrows(cfg, false, &trace);
    std::map<std::uint32_t, std::vector<ArrowsTraceEntry>> per_track;
    for (const auto& e : trace) per_track[e.track_id].push_back(e);
    int checked = 0;
    for (const auto& [id, entries] : per_track)
        for (std::size_t i = 1; i < entries.size(); ++i)
            if (entries[i].turned && entries[i].frame == entries[i - 1].frame + 1) {
                const double delta = std::abs(entries[i].heading - entries[i - 1].heading);
                CHECK(std::abs(delta - 1.5707963267948966) < 1e-9);
                ++checked;
            }
    CHECK(checked > 5);
}

TEST_CASE("amoeboids: invariants and determinism") {
    const auto cfg = small_amoeboids(5);
    const auto ds = generate_amoeboids(cfg);
    CHECK_NOTHROW(validate_dataset(ds));
    CHECK(ds == generate_amoeboids(cfg));
    // Every track spans the whole sequence (amoeboids never exit).
    for (int t = 0; t < ds.num_frames(); ++t)
        CHECK(ds.gt_masks[t].size() == static_cast<std::size_t>(cfg.num_objects));
}

TEST_CASE("amoeboids: shapes are rigid over time") {
    const auto ds = generate_amoeboids(small_amoeboids(9), false);
    for (const auto& [id, cs] : track_centroids(ds)) {
        const auto& first = ds.gt_masks[0].at(id);
        for (int t = 1; t < ds.num_frames(); ++t) {
            const auto& m = ds.gt_masks[t].at(id);
            // Aligning integer render centers must superimpose the pixel sets
            // exactly (masks away from the border).
            const auto bb = mask_bbox(m);
            if (bb.x_min == 0 || bb.y_min == 0 || bb.x_max == ds.grid.width - 1 ||
                bb.y_max == ds.grid.height - 1)
                continue;
            const auto c0 = mask_centroid(first);
            const auto c1 = mask_centroid(m);
            const auto aligned = mask_translate(m, c0.x - c1.x, c0.y - c1.y);
            CHECK(mask_iou(aligned, first) == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("amoeboids: jitter bound holds") {
    AmoeboidsTrace trace;
    auto cfg = small_amoeboids(21);
    cfg.jitter_divisor = 20.0;
    const auto ds = generate_amoeboids(cfg, false, &trace);
    CHECK_NOTHROW(validate_dataset(ds));
    const double bound = cfg.grid.fov() / cfg.jitter_divisor + 0.5; // + rounding
    for (const auto& e : trace) {
        CHECK(std::abs(e.render_x - e.latent_x) <= bound);
        CHECK(std::abs(e.render_y - e.latent_y) <= bound);
    }
}

TEST_CASE("amoeboids: no jitter bounds per-frame displacement") {
    auto cfg = small_amoeboids(33);
    const auto ds = generate_amoeboids(cfg, false);
    for (const auto& [id, cs] : track_centroids(ds))
        for (std::size_t i = 1; i < cs.size(); ++i) {
            const double dx = cs[i].second.x - cs[i - 1].second.x;
            const double dy = cs[i].second.y - cs[i - 1].second.y;
            CHECK(std::sqrt(dx * dx + dy * dy) <= cfg.speed + 1.5);
        }
}

TEST_CASE("amoeboids: distinct objects get distinct shapes") {
    // Across 100 seeded pairs, centroid-aligned pixel sets must differ.
    int identical = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const FrameGrid g{64, 64};
        const auto a = scenegen::detail::build_blob_shape(8.0, 0.5, 2, derive_seed(seed, 0x5a47e, 1));
        const auto b = scenegen::detail::build_blob_shape(8.0, 0.5, 2, derive_seed(seed, 0x5a47e, 2));
        const auto ma = BinaryMask::from_pixels(g, [&] {
            std::vector<std::pair<int, int>> px;
            for (auto [dx, dy] : a) px.emplace_back(dx + 32, dy + 32);
            return px;
        }());
        const auto mb = BinaryMask::from_pixels(g, [&] {
            std::vector<std::pair<int, int>> px;
            for (auto [dx, dy] : b) px.emplace_back(dx + 32, dy + 32);
            return px;
        }());
        const auto ca = mask_centroid(ma);
        const auto cb = mask_centroid(mb);
        if (mask_translate(mb, ca.x - cb.x, ca.y - cb.y) == ma) ++identical;
    }
    CHECK(identical == 0);
}

TEST_CASE("presets: tr and rp parameterizations are expressible") {
    ArrowsScenarioConfig tr1;
    tr1.turn_probability = 0.2;
    tr1.signal_period = 4;
    CHECK_NOTHROW(tr1.validate());
    ArrowsScenarioConfig tr2;
    tr2.turn_probability = 0.8;
    tr2.signal_period = 2;
    CHECK_NOTHROW(tr2.validate());
    AmoeboidsScenarioConfig rp5;
    rp5.jitter_divisor = 5.0;
    CHECK_NOTHROW(rp5.validate());
    AmoeboidsScenarioConfig bad;
    bad.jitter_divisor = 0.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
