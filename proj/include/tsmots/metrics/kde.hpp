#pragma once

#include <cmath>
#include <vector>

#include "tsmots/core/error.hpp"

namespace tsmots {

/// Smoothed distribution of per-sequence scores on the fixed [0, 100] grid.
struct DistributionSummary {
    double mean = 0.0;
    double bandwidth = 0.0;
    std::vector<std::pair<double, double>> kde; // (score, density), 512 points
};

/// Gaussian-kernel density estimate with Scott's-rule bandwidth, reflected at
/// the domain boundaries and renormalized so the trapezoid integral over the
/// grid is exactly 1.
inline DistributionSummary summarize(const std::vector<double>& values) {
    if (values.empty())
        throw ConfigError("summarize: no defined values");
    const std::size_t n = values.size();
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);

    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var = n > 1 ? var / static_cast<double>(n - 1) : 0.0;
    double bw = std::sqrt(var) * std::pow(static_cast<double>(n), -0.2);
    if (!(bw > 0.0)) bw = 1.0; // degenerate sample: single value or zero spread

    constexpr int kPoints = 512;
    constexpr double kLo = 0.0, kHi = 100.0;
    const double step = (kHi - kLo) / (kPoints - 1);
    const double inv = 1.0 / (bw * std::sqrt(2.0 * 3.14159265358979323846));

    DistributionSummary out;
    out.mean = mean;
    out.bandwidth = bw;
    out.kde.reserve(kPoints);
    auto kernel_sum = [&](double x) {
        double s = 0.0;
        for (double v : values) {
            const double z0 = (x - v) / bw;
            const double z1 = (x - (2.0 * kLo - v)) / bw; // reflection at 0
            const double z2 = (x - (2.0 * kHi - v)) / bw; // reflection at 100
            s += std::exp(-0.5 * z0 * z0) + std::exp(-0.5 * z1 * z1) + std::exp(-0.5 * z2 * z2);
        }
        return s * inv / static_cast<double>(n);
    };
    for (int i = 0; i < kPoints; ++i) {
        const double x = kLo + i * step;
        out.kde.emplace_back(x, kernel_sum(x));
    }
    double integral = 0.0;
    for (int i = 1; i < kPoints; ++i)
        integral += 0.5 * (out.kde[i - 1].second + out.kde[i].second) * step;
    if (integral > 0.0)
        for (auto& [x, d] : out.kde) d /= integral;
    return out;
}

} // namespace tsmots
