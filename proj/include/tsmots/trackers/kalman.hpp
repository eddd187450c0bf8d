#pragma once

#include <array>
#include <cmath>
#include <map>

#include "tsmots/assign/hungarian.hpp"
#include "tsmots/assign/track_types.hpp"
#include "tsmots/trackers/config.hpp"

namespace tsmots {

namespace detail {

using Mat4 = std::array<std::array<double, 4>, 4>;

inline Mat4 mat4_zero() { return {}; }

inline Mat4 mat4_diag(double a, double b, double c, double d) {
    Mat4 m{};
    m[0][0] = a;
    m[1][1] = b;
    m[2][2] = c;
    m[3][3] = d;
    return m;
}

} // namespace detail

/// Constant-velocity filter state over (cx, cy, vx, vy) with position-only
/// observations.
struct KalmanTrackState {
    std::array<double, 4> mean{};   // cx, cy, vx, vy
    detail::Mat4 covariance{};
    BinaryMask last_mask;
    int frames_since_observation = 0;
};

/// Fresh state from an initial observation.
inline KalmanTrackState kalman_init(const Centroid& obs, const BinaryMask& mask,
                                    const KalmanParams& p) {
    KalmanTrackState s;
    s.mean = {obs.x, obs.y, 0.0, 0.0};
    s.covariance = detail::mat4_diag(p.measurement_noise_scale, p.measurement_noise_scale,
                                     p.initial_velocity_variance, p.initial_velocity_variance);
    s.last_mask = mask;
    return s;
}

/// Constant-velocity transition: position advances by velocity, covariance
/// propagates with additive process noise.
inline KalmanTrackState kalman_predict(const KalmanTrackState& s,
                                       const KalmanParams& p = KalmanParams{}) {
    KalmanTrackState out = s;
    out.mean[0] = s.mean[0] + s.mean[2];
    out.mean[1] = s.mean[1] + s.mean[3];

    // F P F^T for F = [I I; 0 I] (2x2 blocks), plus q I.
    const auto& P = s.covariance;
    detail::Mat4 fp{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double v = P[i][j];
            if (i < 2) v += P[i + 2][j];
            fp[i][j] = v;
        }
    detail::Mat4 fpft{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double v = fp[i][j];
            if (j < 2) v += fp[i][j + 2];
            fpft[i][j] = v;
        }
    for (int i = 0; i < 4; ++i) fpft[i][i] += p.process_noise_scale;
    out.covariance = fpft;
    out.frames_since_observation = s.frames_since_observation + 1;
    return out;
}

/// Standard correction with a position observation; resets
/// frames_since_observation and replaces last_mask. Joseph-form covariance
/// update keeps the matrix symmetric PSD.
inline KalmanTrackState kalman_update(const KalmanTrackState& s, const Centroid& obs,
                                      const BinaryMask& mask,
                                      const KalmanParams& p = KalmanParams{}) {
    if (!std::isfinite(obs.x) || !std::isfinite(obs.y))
        throw ConfigError("kalman_update: non-finite observation");

    const auto& P = s.covariance;
    const double r = p.measurement_noise_scale;
    // S = H P H^T + R (2x2), H = [I2 0].
    const double s00 = P[0][0] + r, s01 = P[0][1];
    const double s10 = P[1][0], s11 = P[1][1] + r;
    const double det = s00 * s11 - s01 * s10;
    if (!(std::abs(det) > 0.0))
        throw InvariantError("kalman_update: singular innovation covariance");
    const double i00 = s11 / det, i01 = -s01 / det;
    const double i10 = -s10 / det, i11 = s00 / det;

    // K = P H^T S^-1 (4x2); P H^T is the first two columns of P.
    double K[4][2];
    for (int i = 0; i < 4; ++i) {
        K[i][0] = P[i][0] * i00 + P[i][1] * i10;
        K[i][1] = P[i][0] * i01 + P[i][1] * i11;
    }

    KalmanTrackState out = s;
    const double yx = obs.x - s.mean[0];
    const double yy = obs.y - s.mean[1];
    for (int i = 0; i < 4; ++i) out.mean[i] = s.mean[i] + K[i][0] * yx + K[i][1] * yy;

    // Joseph form: (I - K H) P (I - K H)^T + K R K^T.
    double ikh[4][4] = {};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) ikh[i][j] = (i == j ? 1.0 : 0.0);
        ikh[i][0] -= K[i][0];
        ikh[i][1] -= K[i][1];
    }
    detail::Mat4 tmp{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double v = 0.0;
            for (int k = 0; k < 4; ++k) v += ikh[i][k] * P[k][j];
            tmp[i][j] = v;
        }
    detail::Mat4 np{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double v = 0.0;
            for (int k = 0; k < 4; ++k) v += tmp[i][k] * ikh[j][k];
            v += r * (K[i][0] * K[j][0] + K[i][1] * K[j][1]);
            np[i][j] = v;
        }
    // Enforce exact symmetry against rounding drift.
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            const double v = 0.5 * (np[i][j] + np[j][i]);
            np[i][j] = v;
            np[j][i] = v;
        }
    out.covariance = np;
    out.frames_since_observation = 0;
    out.last_mask = mask;
    return out;
}

/// Frame-by-frame forward tracking: predict every live state, gate-limited
/// Hungarian assignment on centroid distance, update matched states, spawn
/// states for unmatched detections. A state survives while its assignment
/// distance (frames since the last matched detection) stays within max_skip;
/// bridged gaps are filled by translating the last observed mask along the
/// linear centroid interpolation.
inline std::vector<TrackFragment> kalman_track_sequence(
    const std::vector<InstanceDetection>& dets, const KalmanParams& params) {
    params.validate();
    std::vector<TrackFragment> fragments;
    if (dets.empty()) return fragments;

    const FrameGrid grid = dets.front().mask.grid();
    const double gate =
        params.gate_distance > 0.0 ? params.gate_distance : grid.fov() / 8.0;

    std::map<int, std::vector<const InstanceDetection*>> by_frame;
    int max_frame = 0;
    for (const auto& d : dets) {
        if (d.mask.empty()) continue;
        by_frame[d.frame].push_back(&d);
        max_frame = std::max(max_frame, d.frame);
    }

    struct LiveTrack {
        KalmanTrackState state;
        std::vector<FragmentEntry> entries;
        Centroid last_obs;
        int last_obs_frame = 0;
    };
    std::vector<LiveTrack> live;
    int next_fragment_id = 0;

    auto retire = [&](LiveTrack& t) {
        TrackFragment f;
        f.fragment_id = next_fragment_id++;
        f.entries = std::move(t.entries);
        f.validate();
        fragments.push_back(std::move(f));
    };

    for (int t = 0; t <= max_frame; ++t) {
        for (auto& lt : live) lt.state = kalman_predict(lt.state, params);

        // Retire states that can no longer be matched within max_skip.
        for (std::size_t i = live.size(); i-- > 0;) {
            if (live[i].state.frames_since_observation > params.max_skip) {
                retire(live[i]);
                live.erase(live.begin() + static_cast<std::ptrdiff_t>(i));
            }
        }

        static const std::vector<const InstanceDetection*> kNoDetections;
        const auto it = by_frame.find(t);
        const auto& frame_dets = it != by_frame.end() ? it->second : kNoDetections;

        std::vector<Centroid> det_centroids(frame_dets.size());
        for (std::size_t j = 0; j < frame_dets.size(); ++j)
            det_centroids[j] = mask_centroid(frame_dets[j]->mask);

        CostMatrix cost(static_cast<int>(live.size()), static_cast<int>(frame_dets.size()));
        for (std::size_t i = 0; i < live.size(); ++i)
            for (std::size_t j = 0; j < frame_dets.size(); ++j) {
                const double dx = live[i].state.mean[0] - det_centroids[j].x;
                const double dy = live[i].state.mean[1] - det_centroids[j].y;
                const double dist = std::sqrt(dx * dx + dy * dy);
                cost.at(static_cast<int>(i), static_cast<int>(j)) =
                    dist <= gate ? dist : kInfiniteCost;
            }
        const Assignment assignment = hungarian(cost);

        std::vector<char> det_used(frame_dets.size(), 0);
        for (std::size_t i = 0; i < live.size(); ++i) {
            const int j = assignment.row_to_col[i];
            if (j < 0) continue;
            det_used[j] = 1;
            auto& lt = live[i];
            const int gap = t - lt.last_obs_frame;
            for (int f = lt.last_obs_frame + 1; f < t; ++f) {
                const double a = static_cast<double>(f - lt.last_obs_frame) / gap;
                const double ix = lt.last_obs.x + a * (det_centroids[j].x - lt.last_obs.x);
                const double iy = lt.last_obs.y + a * (det_centroids[j].y - lt.last_obs.y);
                auto m = mask_translate(lt.state.last_mask, ix - lt.last_obs.x,
                                        iy - lt.last_obs.y);
                if (m.empty()) m = lt.state.last_mask;
                lt.entries.push_back({f, std::move(m), Provenance::interpolated, -1});
            }
            lt.state = kalman_update(lt.state, det_centroids[j], frame_dets[j]->mask, params);
            lt.entries.push_back({t, frame_dets[j]->mask, Provenance::detected, -1});
            lt.last_obs = det_centroids[j];
            lt.last_obs_frame = t;
        }

        for (std::size_t j = 0; j < frame_dets.size(); ++j) {
            if (det_used[j]) continue;
            LiveTrack lt;
            lt.state = kalman_init(det_centroids[j], frame_dets[j]->mask, params);
            lt.entries.push_back({t, frame_dets[j]->mask, Provenance::detected, -1});
            lt.last_obs = det_centroids[j];
            lt.last_obs_frame = t;
            live.push_back(std::move(lt));
        }
    }
    for (auto& lt : live) retire(lt);

    // Deterministic output order: by start frame, then first-entry geometry.
    std::sort(fragments.begin(), fragments.end(), [](const TrackFragment& a, const TrackFragment& b) {
        if (a.start_frame() != b.start_frame()) return a.start_frame() < b.start_frame();
        return a.entries.front().mask.runs().front().start <
               b.entries.front().mask.runs().front().start;
    });
    for (std::size_t i = 0; i < fragments.size(); ++i)
        fragments[i].fragment_id = static_cast<int>(i);
    return fragments;
}

} // namespace tsmots
