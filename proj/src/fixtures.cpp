#include "fuzzyseek/fixtures.hpp"

#include <cstdio>

#include "fuzzyseek/error.hpp"
#include "fuzzyseek/image_io.hpp"

namespace fuzzyseek {
namespace {

// Distribution objects are implementation-defined; plain modulo keeps the
// corpus identical across standard libraries.
std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

}  // namespace

Image split_image(std::size_t width, std::size_t height, Rgb left, Rgb right, std::size_t left_columns) {
    Image image(width, height, right);
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < std::min(left_columns, width); ++x) image.set(x, y, left);
    }
    return image;
}

std::vector<Image> generate_fixture_images(const FixtureOptions& options, const Palette& palette) {
    if (options.width < 2 || options.height < 1) {
        throw Error(ErrorCode::InvalidArgument, "fixture images need width >= 2 and height >= 1");
    }
    std::mt19937_64 rng(options.seed);
    const std::uint64_t solid_per_million = static_cast<std::uint64_t>(options.solid_share * 1e6);
    std::vector<Image> images;
    images.reserve(options.count);
    for (std::size_t i = 0; i < options.count; ++i) {
        const std::size_t a = below(rng, palette.size());
        if (below(rng, 1000000) < solid_per_million) {
            images.emplace_back(options.width, options.height, palette[a].rgb);
            continue;
        }
        std::size_t b = below(rng, palette.size() - 1);
        if (b >= a) ++b;
        const std::size_t columns = 1 + below(rng, options.width - 1);
        images.push_back(split_image(options.width, options.height, palette[a].rgb, palette[b].rgb, columns));
    }
    return images;
}

std::vector<std::filesystem::path> write_fixtures(const std::filesystem::path& dir, const FixtureOptions& options,
                                                  const Palette& palette) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
    const auto images = generate_fixture_images(options, palette);
    std::vector<std::filesystem::path> paths;
    for (std::size_t i = 0; i < images.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "fixture_%05zu.ppm", i);
        paths.push_back(dir / name);
        write_ppm(images[i], paths.back());
    }
    return paths;
}

}  // namespace fuzzyseek
