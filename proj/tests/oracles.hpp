#pragma once

// Reference computations that deliberately avoid the library's code paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "fuzzyseek/color.hpp"
#include "fuzzyseek/signature.hpp"

namespace fuzzyseek::oracle {

struct NamedRgb {
    const char* name;
    int r, g, b;
};

// Hard-coded copy of the default palette.
inline constexpr std::array<NamedRgb, 16> kPaletteTable{{
    {"BLACK", 0, 0, 0},        {"SILVER", 192, 192, 192}, {"WHITE", 255, 255, 255}, {"GRAY", 128, 128, 128},
    {"RED", 255, 0, 0},        {"ORANGE", 255, 165, 0},   {"YELLOW", 255, 255, 0},  {"LIME", 0, 255, 0},
    {"GREEN", 0, 128, 0},      {"TURQUOISE", 64, 224, 208}, {"CYAN", 0, 255, 255},  {"OCEAN", 0, 119, 190},
    {"BLUE", 0, 0, 255},       {"VIOLET", 238, 130, 238}, {"MAGENTA", 255, 0, 255}, {"RASPBERRY", 227, 11, 92},
}};

/// Brute-force Euclidean RGB argmin; returns the index and whether it is unique.
inline std::pair<std::size_t, bool> brute_force_rgb_nearest(int r, int g, int b) {
    std::vector<long> d;
    for (const auto& c : kPaletteTable) {
        d.push_back(long(r - c.r) * (r - c.r) + long(g - c.g) * (g - c.g) + long(b - c.b) * (b - c.b));
    }
    const auto it = std::min_element(d.begin(), d.end());
    return {std::size_t(it - d.begin()), std::count(d.begin(), d.end(), *it) == 1};
}

/// Fuzzy cardinality from its set-theoretic definition: the grade of "exactly
/// k elements" is the best, over all k-subsets S, of
///   min( min_{i in S} mu_i, min_{i not in S} (1 - mu_i) ).
/// Exponential in n; keep n small.
inline std::vector<double> subset_fuzzy_cardinality(const std::vector<double>& mu) {
    const std::size_t n = mu.size();
    std::vector<double> card(n + 1, 0.0);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        double grade = 1.0;
        std::size_t size = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                grade = std::min(grade, mu[i]);
                ++size;
            } else {
                grade = std::min(grade, 1.0 - mu[i]);
            }
        }
        card[size] = std::max(card[size], grade);
    }
    return card;
}

/// Literal membership 1 - exp(-alpha (x - y)^2).
inline double direct_membership(double x, double y, double alpha) {
    return 1.0 - std::exp(-alpha * (x - y) * (x - y));
}

/// Random normalized histogram with between 1 and `max_colors` nonzero bins;
/// bins are multiples of 1/pixels like a real image's would be.
inline ColorHistogram random_histogram(std::mt19937_64& rng, std::size_t bins, std::size_t max_colors,
                                       std::uint64_t pixels = 1000) {
    const std::size_t colors = 1 + rng() % max_colors;
    std::vector<std::uint64_t> counts(bins, 0);
    for (std::size_t c = 0; c < colors; ++c) counts[rng() % bins] += 1;  // chosen bins
    std::uint64_t assigned = 0;
    for (auto& c : counts) {
        if (c) {
            c = 1;
            ++assigned;
        }
    }
    for (std::uint64_t p = assigned; p < pixels; ++p) {
        std::size_t pick;
        do pick = rng() % bins;
        while (counts[pick] == 0);
        ++counts[pick];
    }
    std::vector<double> h(bins);
    for (std::size_t i = 0; i < bins; ++i) h[i] = double(counts[i]) / double(pixels);
    return ColorHistogram(std::move(h), pixels);
}

inline FuzzySignature random_signature(std::mt19937_64& rng, std::size_t bins = 16, std::size_t max_colors = 4,
                                       std::uint32_t sig_len = 10) {
    return signature_from_histogram(random_histogram(rng, bins, max_colors), sig_len);
}

inline std::vector<double> random_weights(std::mt19937_64& rng, std::size_t n, double scale = 120.0) {
    std::vector<double> v(n);
    for (auto& x : v) {
        // Mix exact zeros, small and large values.
        const auto kind = rng() % 4;
        if (kind == 0) {
            x = 0.0;
        } else {
            x = scale * double(rng() >> 11) * 0x1.0p-53;
            if (kind == 1) x /= 100.0;
        }
    }
    return v;
}

}  // namespace fuzzyseek::oracle
