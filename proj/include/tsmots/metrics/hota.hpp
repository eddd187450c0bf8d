#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "tsmots/assign/hungarian.hpp"
#include "tsmots/core/grid.hpp"

namespace tsmots {

/// Per-frame map from track id to its bounding box.
using FrameBoxes = std::map<std::uint32_t, BoundingBox>;

struct HotaAlphaScores {
    double alpha = 0.0;
    double deta = 0.0;
    double assa = 0.0;
    double hota = 0.0;
};

struct HotaScores {
    double deta = 0.0;
    double assa = 0.0;
    double hota = 0.0;
    std::vector<HotaAlphaScores> per_alpha;
};

/// Higher-order tracking accuracy over box IoU, averaged over the alpha grid
/// 0.05, 0.10, ..., 0.95. Per alpha, frames are matched bijectively by a
/// Hungarian solve that maximizes the number of IoU >= alpha pairs and
/// tie-breaks by the global association alignment; A(c) for each matched
/// pair is TPA/(TPA+FNA+FPA) over the whole sequence. Scores are scaled to
/// [0, 100]. HOTA_alpha^2 = DetA_alpha * AssA_alpha by construction.
inline HotaScores hota_family(const std::vector<FrameBoxes>& gt,
                              const std::vector<FrameBoxes>& pd) {
    const int frames = static_cast<int>(std::max(gt.size(), pd.size()));
    static const FrameBoxes kEmpty;
    auto at = [](const std::vector<FrameBoxes>& v, int f) -> const FrameBoxes& {
        return f < static_cast<int>(v.size()) ? v[f] : kEmpty;
    };

    // Dense re-indexing of ids.
    std::map<std::uint32_t, int> gt_index, pd_index;
    for (int f = 0; f < frames; ++f) {
        for (const auto& [id, box] : at(gt, f)) gt_index.try_emplace(id, gt_index.size());
        for (const auto& [id, box] : at(pd, f)) pd_index.try_emplace(id, pd_index.size());
    }
    const int ng = static_cast<int>(gt_index.size());
    const int np = static_cast<int>(pd_index.size());

    struct FrameData {
        std::vector<int> gt_ids, pd_ids;
        std::vector<std::vector<double>> sim; // gt x pd box IoU
    };
    std::vector<FrameData> frame_data(frames);

    std::vector<double> gt_count(ng, 0.0), pd_count(np, 0.0);
    std::vector<std::vector<double>> potential(ng, std::vector<double>(np, 0.0));

    for (int f = 0; f < frames; ++f) {
        auto& fd = frame_data[f];
        for (const auto& [id, box] : at(gt, f)) fd.gt_ids.push_back(gt_index.at(id));
        for (const auto& [id, box] : at(pd, f)) fd.pd_ids.push_back(pd_index.at(id));
        fd.sim.assign(fd.gt_ids.size(), std::vector<double>(fd.pd_ids.size(), 0.0));
        int gi = 0;
        for (const auto& [gid, gbox] : at(gt, f)) {
            int pi = 0;
            for (const auto& [pid, pbox] : at(pd, f)) fd.sim[gi][pi++] = box_iou(gbox, pbox);
            ++gi;
        }
        for (int g : fd.gt_ids) gt_count[g] += 1.0;
        for (int p : fd.pd_ids) pd_count[p] += 1.0;

        // Accumulate similarity-Jaccard potential matches for the global
        // alignment score.
        const std::size_t rows = fd.gt_ids.size(), cols = fd.pd_ids.size();
        std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) {
                row_sum[i] += fd.sim[i][j];
                col_sum[j] += fd.sim[i][j];
            }
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) {
                const double denom = row_sum[i] + col_sum[j] - fd.sim[i][j];
                if (denom > 1e-12)
                    potential[fd.gt_ids[i]][fd.pd_ids[j]] += fd.sim[i][j] / denom;
            }
    }

    std::vector<std::vector<double>> galign(ng, std::vector<double>(np, 0.0));
    for (int g = 0; g < ng; ++g)
        for (int p = 0; p < np; ++p) {
            const double denom = gt_count[g] + pd_count[p] - potential[g][p];
            galign[g][p] = denom > 1e-12 ? potential[g][p] / denom : 0.0;
        }

    HotaScores out;
    constexpr double kTpBonus = 1e6;
    constexpr double kAlphaEps = 1e-12;
    double sum_deta = 0.0, sum_assa = 0.0, sum_hota = 0.0;
    for (int ai = 0; ai < 19; ++ai) {
        const double alpha = 0.05 * (ai + 1);
        long tp = 0, fn = 0, fp = 0;
        std::map<std::pair<int, int>, long> matches;
        for (int f = 0; f < frames; ++f) {
            const auto& fd = frame_data[f];
            const int rows = static_cast<int>(fd.gt_ids.size());
            const int cols = static_cast<int>(fd.pd_ids.size());
            long frame_tp = 0;
            if (rows > 0 && cols > 0) {
                CostMatrix cost(rows, cols);
                for (int i = 0; i < rows; ++i)
                    for (int j = 0; j < cols; ++j) {
                        const double s = fd.sim[i][j];
                        const bool eligible = s >= alpha - kAlphaEps && s > 0.0;
                        const double score =
                            eligible ? kTpBonus + galign[fd.gt_ids[i]][fd.pd_ids[j]] * s : 0.0;
                        cost.at(i, j) = -score;
                    }
                const Assignment a = detail::solve_assignment(cost);
                for (int i = 0; i < rows; ++i) {
                    const int j = a.row_to_col[i];
                    if (j < 0) continue;
                    const double s = fd.sim[i][j];
                    if (s >= alpha - kAlphaEps && s > 0.0) {
                        ++frame_tp;
                        ++matches[{fd.gt_ids[i], fd.pd_ids[j]}];
                    }
                }
            }
            tp += frame_tp;
            fn += rows - frame_tp;
            fp += cols - frame_tp;
        }

        double ass_sum = 0.0;
        for (const auto& [gp, m] : matches) {
            const double a_c =
                m / (gt_count[gp.first] + pd_count[gp.second] - static_cast<double>(m));
            ass_sum += static_cast<double>(m) * a_c;
        }
        const long denom = tp + fn + fp;
        HotaAlphaScores as;
        as.alpha = alpha;
        as.deta = denom > 0 ? 100.0 * tp / static_cast<double>(denom) : 0.0;
        as.assa = tp > 0 ? 100.0 * ass_sum / static_cast<double>(tp) : 0.0;
        as.hota = denom > 0 ? 100.0 * std::sqrt(ass_sum / static_cast<double>(denom)) : 0.0;
        out.per_alpha.push_back(as);
        sum_deta += as.deta;
        sum_assa += as.assa;
        sum_hota += as.hota;
    }
    out.deta = sum_deta / 19.0;
    out.assa = sum_assa / 19.0;
    out.hota = sum_hota / 19.0;
    return out;
}

} // namespace tsmots
