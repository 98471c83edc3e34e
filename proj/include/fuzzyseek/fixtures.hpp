#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "fuzzyseek/color.hpp"

namespace fuzzyseek {

/// Left `left_columns` columns in `left`, the rest in `right`.
Image split_image(std::size_t width, std::size_t height, Rgb left, Rgb right, std::size_t left_columns);

struct FixtureOptions {
    std::size_t count = 100;
    std::uint64_t seed = 1;
    std::size_t width = 32;
    std::size_t height = 8;
    /// Share of images that are a single palette color; the rest are
    /// two-color vertical splits with a random column boundary.
    double solid_share = 0.1;
};

/// Seeded synthetic corpus over the palette colors. Only the raw engine
/// output is used, so the same seed yields the same images on every
/// platform.
std::vector<Image> generate_fixture_images(const FixtureOptions& options, const Palette& palette);

/// Writes fixture_00000.ppm ... as ASCII PPM and returns the paths in order.
std::vector<std::filesystem::path> write_fixtures(const std::filesystem::path& dir, const FixtureOptions& options,
                                                  const Palette& palette);

}  // namespace fuzzyseek
