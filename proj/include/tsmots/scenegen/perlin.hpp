#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "tsmots/core/rng.hpp"

namespace tsmots::scenegen {

/// Classic 2-D gradient-lattice noise with a seeded permutation table.
/// Output is normalized to [-1, 1].
class PerlinNoise {
public:
    explicit PerlinNoise(std::uint64_t seed) {
        for (int i = 0; i < 256; ++i) perm_[i] = static_cast<std::uint8_t>(i);
        Rng rng(seed);
        for (int i = 255; i > 0; --i) {
            const int j = static_cast<int>(rng.uniform_int(0, i));
            std::swap(perm_[i], perm_[j]);
        }
        for (int i = 0; i < 256; ++i) perm_[256 + i] = perm_[i];
    }

    double sample(double x, double y) const {
        const int xi = fast_floor(x), yi = fast_floor(y);
        const double xf = x - xi, yf = y - yi;
        const double u = fade(xf), v = fade(yf);
        const int x0 = xi & 255, y0 = yi & 255;
        const double n00 = grad(perm_[perm_[x0] + y0], xf, yf);
        const double n10 = grad(perm_[perm_[x0 + 1] + y0], xf - 1, yf);
        const double n01 = grad(perm_[perm_[x0] + y0 + 1], xf, yf - 1);
        const double n11 = grad(perm_[perm_[x0 + 1] + y0 + 1], xf - 1, yf - 1);
        const double nx0 = lerp(n00, n10, u);
        const double nx1 = lerp(n01, n11, u);
        // sqrt(2)/2 is the max magnitude of single-octave 2-D Perlin.
        const double n = lerp(nx0, nx1, v) / 0.70710678118654752440;
        return std::clamp(n, -1.0, 1.0);
    }

    /// Octave sum with persistence 0.5 and lacunarity 2, renormalized to [-1, 1].
    double fractal(double x, double y, int octaves) const {
        double sum = 0.0, amp = 1.0, freq = 1.0, norm = 0.0;
        for (int o = 0; o < octaves; ++o) {
            sum += amp * sample(x * freq, y * freq);
            norm += amp;
            amp *= 0.5;
            freq *= 2.0;
        }
        return norm > 0.0 ? sum / norm : 0.0;
    }

    /// Periodic 1-D profile: the fractal noise sampled on a circle, so
    /// angle 0 and 2*pi meet smoothly.
    double on_circle(double angle, int octaves, double circle_radius = 1.0) const {
        return fractal(1.5 + circle_radius * std::cos(angle),
                       1.5 + circle_radius * std::sin(angle), octaves);
    }

private:
    static int fast_floor(double v) {
        const int i = static_cast<int>(v);
        return v < i ? i - 1 : i;
    }
    static double fade(double t) { return t * t * t * (t * (t * 6 - 15) + 10); }
    static double lerp(double a, double b, double t) { return a + t * (b - a); }
    static double grad(int h, double x, double y) {
        switch (h & 7) {
            case 0: return x + y;
            case 1: return x - y;
            case 2: return -x + y;
            case 3: return -x - y;
            case 4: return x;
            case 5: return -x;
            case 6: return y;
            default: return -y;
        }
    }

    std::array<std::uint8_t, 512> perm_{};
};

} // namespace tsmots::scenegen
