#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fuzzyseek {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Hsv {
    double hue = 0.0;         // degrees, [0, 360)
    double saturation = 0.0;  // [0, 1]
    double value = 0.0;       // [0, 1]

    friend bool operator==(const Hsv&, const Hsv&) = default;
};

Hsv rgb_to_hsv(Rgb rgb);

/// Row-major RGB pixel grid.
class Image {
public:
    Image() = default;
    Image(std::size_t width, std::size_t height, std::vector<Rgb> pixels);
    Image(std::size_t width, std::size_t height, Rgb fill);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return pixels_.size(); }

    std::span<const Rgb> pixels() const noexcept { return pixels_; }
    Rgb at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }
    void set(std::size_t x, std::size_t y, Rgb value) { pixels_[y * width_ + x] = value; }

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<Rgb> pixels_;
};

struct PaletteColor {
    PaletteColor(std::string name, Rgb rgb);

    std::string name;
    Rgb rgb;
    Hsv hsv;
};

/// Ordered set of named reference colors. The order fixes the histogram
/// bin order and therefore the block order of every signature.
class Palette {
public:
    explicit Palette(std::vector<PaletteColor> colors);

    /// BLACK, SILVER, WHITE, GRAY, RED, ORANGE, YELLOW, LIME, GREEN,
    /// TURQUOISE, CYAN, OCEAN, BLUE, VIOLET, MAGENTA, RASPBERRY.
    static const Palette& standard();

    /// JSON array of {"name": ..., "rgb": [r, g, b]} in bin order.
    static Palette from_json(std::string_view text);
    static Palette load(const std::filesystem::path& path);
    std::string to_json() const;

    std::size_t size() const noexcept { return colors_.size(); }
    const PaletteColor& operator[](std::size_t i) const { return colors_[i]; }
    std::span<const PaletteColor> colors() const noexcept { return colors_; }

    /// Index of the color with the given name; throws InvalidArgument.
    std::size_t index_of(std::string_view name) const;

    friend bool operator==(const Palette& a, const Palette& b);

private:
    std::vector<PaletteColor> colors_;
};

enum class ColorSpace { Rgb, Hsv };

std::string_view to_string(ColorSpace space);
ColorSpace parse_color_space(std::string_view text);

/// Squared distance used for nearest-color assignment. In HSV space the
/// hue difference is circular and scaled to [0, 1] by 180 degrees, and the
/// components are weighted (2, 1, 1).
double color_distance_sq(Rgb pixel, const PaletteColor& color, ColorSpace space);

/// Nearest palette color; ties go to the lowest index.
std::size_t quantize_pixel(Rgb pixel, const Palette& palette, ColorSpace space);

class ColorHistogram {
public:
    ColorHistogram() = default;
    /// Validates that bins are non-negative and, for a non-empty image,
    /// sum to one.
    ColorHistogram(std::vector<double> bins, std::uint64_t pixel_count);

    std::span<const double> bins() const noexcept { return bins_; }
    std::size_t size() const noexcept { return bins_.size(); }
    double operator[](std::size_t i) const { return bins_[i]; }
    std::uint64_t pixel_count() const noexcept { return pixel_count_; }

private:
    std::vector<double> bins_;
    std::uint64_t pixel_count_ = 0;
};

/// Raw per-bin pixel counts after quantization.
std::vector<std::uint64_t> count_colors(const Image& image, const Palette& palette, ColorSpace space);

/// Normalized histogram restricted to the dominant colors: bins whose raw
/// fraction is below `dominance_threshold` are dropped and the survivors
/// renormalized. Throws EmptyImage for a zero-pixel image.
ColorHistogram compute_histogram(const Image& image, const Palette& palette, ColorSpace space,
                                 double dominance_threshold = 0.0);

}  // namespace fuzzyseek
