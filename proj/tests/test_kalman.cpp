#include <doctest.h>

#include <cmath>

#include "support/builders.hpp"
#include "tsmots/trackers/kalman.hpp"

using namespace tsmots;

namespace {

const FrameGrid g{256, 256};

bool is_psd(const detail::Mat4& m) {
    // Symmetric + all leading principal minors non-negative (within rounding).
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (std::abs(m[i][j] - m[j][i]) > 1e-9) return false;
    double a[4][4];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a[i][j] = m[i][j];
    // Cholesky with tolerance.
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[i][j];
            for (int k = 0; k < j; ++k) s -= a[i][k] * a[j][k];
            if (i == j) {
                if (s < -1e-9) return false;
                a[i][i] = std::sqrt(std::max(s, 0.0));
            } else {
                a[i][j] = a[j][j] > 1e-12 ? s / a[j][j] : 0.0;
            }
        }
    }
    return true;
}

InstanceDetection det_at(int frame, int x, int y) {
    return {frame, 0, builders::rect_mask(g, x - 3, y - 3, x + 3, y + 3)};
}

} // namespace

TEST_CASE("kalman_predict: stationary mean, growing covariance") {
    KalmanParams p;
    auto s = kalman_init({10.0, 20.0}, builders::rect_mask(g, 8, 18, 12, 22), p);
    const auto s1 = kalman_predict(s, p);
    CHECK(s1.mean[0] == 10.0);
    CHECK(s1.mean[1] == 20.0);
    CHECK(s1.frames_since_observation == 1);
    double tr0 = 0, tr1 = 0;
    for (int i = 0; i < 4; ++i) {
        tr0 += s.covariance[i][i];
        tr1 += s1.covariance[i][i];
    }
    CHECK(tr1 > tr0);
}

TEST_CASE("kalman_predict: deterministic linear map of the mean") {
    KalmanParams p;
    KalmanTrackState s;
    s.mean = {10.0, 10.0, 2.0, -1.0};
    s.covariance = detail::mat4_diag(1, 1, 1, 1);
    const auto s1 = kalman_predict(s, p);
    CHECK(s1.mean[0] == 12.0);
    CHECK(s1.mean[1] == 9.0);
    CHECK(s1.mean[2] == 2.0);
    CHECK(s1.mean[3] == -1.0);
}

TEST_CASE("kalman_predict: trace strictly increases along filter runs") {
    KalmanParams p;
    Rng rng(77);
    auto s = kalman_init({50, 50}, builders::rect_mask(g, 47, 47, 53, 53), p);
    for (int i = 0; i < 50; ++i) {
        const auto before = s;
        s = kalman_predict(s, p);
        double tr0 = 0, tr1 = 0;
        for (int k = 0; k < 4; ++k) {
            tr0 += before.covariance[k][k];
            tr1 += s.covariance[k][k];
        }
        CHECK(tr1 > tr0);
        if (rng.bernoulli(0.6))
            s = kalman_update(s, {50 + rng.uniform(-5, 5), 50 + rng.uniform(-5, 5)},
                              before.last_mask, p);
    }
}

TEST_CASE("kalman_update: near-zero measurement noise pins the position") {
    KalmanParams p;
    p.measurement_noise_scale = 1e-12;
    auto s = kalman_init({10, 10}, builders::rect_mask(g, 7, 7, 13, 13), p);
    s = kalman_predict(s, p);
    const auto u = kalman_update(s, {42.0, 17.0}, s.last_mask, p);
    CHECK(u.mean[0] == doctest::Approx(42.0).epsilon(1e-9));
    CHECK(u.mean[1] == doctest::Approx(17.0).epsilon(1e-9));
    CHECK(u.frames_since_observation == 0);
}

TEST_CASE("kalman_update: observation equal to prediction leaves position, shrinks covariance") {
    KalmanParams p;
    auto s = kalman_init({30, 40}, builders::rect_mask(g, 27, 37, 33, 43), p);
    s = kalman_predict(s, p);
    const Centroid predicted{s.mean[0], s.mean[1]};
    const auto u = kalman_update(s, predicted, s.last_mask, p);
    CHECK(u.mean[0] == doctest::Approx(predicted.x));
    CHECK(u.mean[1] == doctest::Approx(predicted.y));
    CHECK(u.covariance[0][0] < s.covariance[0][0]);
    CHECK(u.covariance[1][1] < s.covariance[1][1]);
}

TEST_CASE("kalman_update: velocity converges on a constant-velocity target") {
    KalmanParams p;
    p.process_noise_scale = 1e-9;
    p.measurement_noise_scale = 1e-9;
    auto s = kalman_init({0, 0}, builders::rect_mask(g, 0, 0, 4, 4), p);
    s = kalman_predict(s, p);
    s = kalman_update(s, {3.0, -2.0}, s.last_mask, p);
    CHECK(std::abs(s.mean[2] - 3.0) < 1e-6);
    CHECK(std::abs(s.mean[3] + 2.0) < 1e-6);
}

TEST_CASE("kalman_update rejects non-finite observations") {
    KalmanParams p;
    auto s = kalman_init({0, 0}, builders::rect_mask(g, 0, 0, 4, 4), p);
    CHECK_THROWS_AS(kalman_update(s, {std::nan(""), 0.0}, s.last_mask, p), ConfigError);
}

TEST_CASE("covariance stays symmetric PSD through random interleavings") {
    Rng rng(123);
    for (int run = 0; run < 20; ++run) {
        KalmanParams p;
        p.process_noise_scale = rng.uniform(0.1, 5.0);
        p.measurement_noise_scale = rng.uniform(0.1, 5.0);
        auto s = kalman_init({rng.uniform(0, 200), rng.uniform(0, 200)},
                             builders::rect_mask(g, 10, 10, 20, 20), p);
        for (int step = 0; step < 40; ++step) {
            s = kalman_predict(s, p);
            CHECK(is_psd(s.covariance));
            if (rng.bernoulli(0.5)) {
                s = kalman_update(s, {rng.uniform(0, 200), rng.uniform(0, 200)}, s.last_mask, p);
                CHECK(is_psd(s.covariance));
            }
        }
    }
}

TEST_CASE("predict then update with exact observation is a fixed point at zero noise") {
    KalmanParams p;
    p.process_noise_scale = 1e-12;
    p.measurement_noise_scale = 1e-12;
    auto s = kalman_init({5, 5}, builders::rect_mask(g, 2, 2, 8, 8), p);
    s = kalman_predict(s, p);
    s = kalman_update(s, {5.0, 5.0}, s.last_mask, p);
    for (int i = 0; i < 5; ++i) {
        const auto pred = kalman_predict(s, p);
        const auto upd = kalman_update(pred, {pred.mean[0], pred.mean[1]}, pred.last_mask, p);
        CHECK(upd.mean[0] == doctest::Approx(pred.mean[0]).epsilon(1e-12));
        CHECK(upd.mean[1] == doctest::Approx(pred.mean[1]).epsilon(1e-12));
        s = upd;
    }
}

TEST_CASE("kalman_track_sequence: single object, full coverage, one fragment") {
    std::vector<InstanceDetection> dets;
    for (int t = 0; t < 30; ++t) dets.push_back(det_at(t, 20 + 4 * t, 50));
    KalmanParams p;
    const auto frags = kalman_track_sequence(dets, p);
    REQUIRE(frags.size() == 1);
    CHECK(frags[0].entries.size() == 30);
    for (const auto& e : frags[0].entries) CHECK(e.provenance == Provenance::detected);
}

TEST_CASE("kalman_track_sequence: gap bridging boundary at max_skip") {
    KalmanParams p; // max_skip = 8
    auto make = [&](int resume_frame) {
        std::vector<InstanceDetection> dets;
        for (int t = 0; t <= 12; ++t) dets.push_back(det_at(t, 20 + 4 * t, 100));
        for (int t = resume_frame; t < resume_frame + 13; ++t)
            dets.push_back(det_at(t, 20 + 4 * t, 100));
        return kalman_track_sequence(dets, p);
    };
    // Assignment distance 8 (7 hidden frames): bridged, hidden frames interpolated.
    const auto bridged = make(20);
    REQUIRE(bridged.size() == 1);
    int interpolated = 0;
    for (const auto& e : bridged[0].entries)
        if (e.provenance == Provenance::interpolated) ++interpolated;
    CHECK(interpolated == 7);
    CHECK(bridged[0].entries.size() == 13 + 7 + 13);

    // Assignment distance 9: the state retires first, two fragments.
    const auto split = make(21);
    CHECK(split.size() == 2);
}

TEST_CASE("kalman_track_sequence: interpolated masks follow the centroid line") {
    KalmanParams p;
    std::vector<InstanceDetection> dets;
    for (int t = 0; t <= 10; ++t) dets.push_back(det_at(t, 20 + 4 * t, 100));
    dets.push_back(det_at(14, 20 + 4 * 14, 100));
    const auto frags = kalman_track_sequence(dets, p);
    REQUIRE(frags.size() == 1);
    for (const auto& e : frags[0].entries) {
        if (e.provenance != Provenance::interpolated) continue;
        const auto c = mask_centroid(e.mask);
        CHECK(c.x == doctest::Approx(20.0 + 4.0 * e.frame).epsilon(0.05));
        CHECK(c.y == doctest::Approx(100.0));
    }
}
