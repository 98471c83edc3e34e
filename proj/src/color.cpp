#include "fuzzyseek/color.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fuzzyseek/error.hpp"

namespace fuzzyseek {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyImage: return "EmptyImage";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::Io: return "Io";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::EmptyIndex: return "EmptyIndex";
    case ErrorCode::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorCode::CorruptIndex: return "CorruptIndex";
    }
    return "Unknown";
}

Hsv rgb_to_hsv(Rgb rgb) {
    const double r = rgb.r / 255.0;
    const double g = rgb.g / 255.0;
    const double b = rgb.b / 255.0;
    const double max = std::max({r, g, b});
    const double min = std::min({r, g, b});
    const double delta = max - min;

    Hsv out;
    out.value = max;
    out.saturation = max > 0.0 ? delta / max : 0.0;
    if (delta > 0.0) {
        double h;
        if (max == r) {
            h = 60.0 * std::fmod((g - b) / delta, 6.0);
        } else if (max == g) {
            h = 60.0 * ((b - r) / delta + 2.0);
        } else {
            h = 60.0 * ((r - g) / delta + 4.0);
        }
        if (h < 0.0) h += 360.0;
        if (h >= 360.0) h -= 360.0;
        out.hue = h;
    }
    return out;
}

Image::Image(std::size_t width, std::size_t height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (pixels_.size() != width_ * height_) {
        throw Error(ErrorCode::InvalidArgument, "pixel buffer does not match image dimensions");
    }
}

Image::Image(std::size_t width, std::size_t height, Rgb fill)
    : width_(width), height_(height), pixels_(width * height, fill) {}

PaletteColor::PaletteColor(std::string name_, Rgb rgb_)
    : name(std::move(name_)), rgb(rgb_), hsv(rgb_to_hsv(rgb_)) {}

Palette::Palette(std::vector<PaletteColor> colors) : colors_(std::move(colors)) {
    if (colors_.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "palette needs at least two colors");
    }
    std::set<std::string_view> names;
    for (const auto& c : colors_) {
        if (c.name.empty()) throw Error(ErrorCode::InvalidArgument, "palette color name is empty");
        if (!names.insert(c.name).second) {
            throw Error(ErrorCode::InvalidArgument, "duplicate palette color name '" + c.name + "'");
        }
    }
}

const Palette& Palette::standard() {
    static const Palette palette({
        {"BLACK", {0, 0, 0}},
        {"SILVER", {192, 192, 192}},
        {"WHITE", {255, 255, 255}},
        {"GRAY", {128, 128, 128}},
        {"RED", {255, 0, 0}},
        {"ORANGE", {255, 165, 0}},
        {"YELLOW", {255, 255, 0}},
        {"LIME", {0, 255, 0}},
        {"GREEN", {0, 128, 0}},
        {"TURQUOISE", {64, 224, 208}},
        {"CYAN", {0, 255, 255}},
        {"OCEAN", {0, 119, 190}},
        {"BLUE", {0, 0, 255}},
        {"VIOLET", {238, 130, 238}},
        {"MAGENTA", {255, 0, 255}},
        {"RASPBERRY", {227, 11, 92}},
    });
    return palette;
}

Palette Palette::from_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("palette is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw Error(ErrorCode::InvalidArgument, "palette must be a JSON array");

    std::vector<PaletteColor> colors;
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("name") || !item.contains("rgb") ||
            !item["name"].is_string() || !item["rgb"].is_array() || item["rgb"].size() != 3) {
            throw Error(ErrorCode::InvalidArgument, "palette entries must be {name, rgb:[r,g,b]}");
        }
        std::uint8_t channel[3];
        for (std::size_t i = 0; i < 3; ++i) {
            const auto& v = item["rgb"][i];
            if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > 255) {
                throw Error(ErrorCode::InvalidArgument, "palette rgb values must be integers in [0,255]");
            }
            channel[i] = static_cast<std::uint8_t>(v.get<int>());
        }
        colors.emplace_back(item["name"].get<std::string>(), Rgb{channel[0], channel[1], channel[2]});
    }
    return Palette(std::move(colors));
}

Palette Palette::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open palette file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_json(buffer.str());
}

std::string Palette::to_json() const {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& c : colors_) {
        doc.push_back({{"name", c.name}, {"rgb", {c.rgb.r, c.rgb.g, c.rgb.b}}});
    }
    return doc.dump();
}

std::size_t Palette::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < colors_.size(); ++i) {
        if (colors_[i].name == name) return i;
    }
    throw Error(ErrorCode::InvalidArgument, "no palette color named '" + std::string(name) + "'");
}

bool operator==(const Palette& a, const Palette& b) {
    return std::equal(a.colors_.begin(), a.colors_.end(), b.colors_.begin(), b.colors_.end(),
                      [](const PaletteColor& x, const PaletteColor& y) {
                          return x.name == y.name && x.rgb == y.rgb;
                      });
}

std::string_view to_string(ColorSpace space) {
    return space == ColorSpace::Rgb ? "rgb" : "hsv";
}

ColorSpace parse_color_space(std::string_view text) {
    if (text == "rgb") return ColorSpace::Rgb;
    if (text == "hsv") return ColorSpace::Hsv;
    throw Error(ErrorCode::InvalidArgument, "unknown colorspace '" + std::string(text) + "'");
}

double color_distance_sq(Rgb pixel, const PaletteColor& color, ColorSpace space) {
    if (space == ColorSpace::Rgb) {
        const double dr = double(pixel.r) - color.rgb.r;
        const double dg = double(pixel.g) - color.rgb.g;
        const double db = double(pixel.b) - color.rgb.b;
        return dr * dr + dg * dg + db * db;
    }
    const Hsv p = rgb_to_hsv(pixel);
    double dh = std::abs(p.hue - color.hsv.hue);
    if (dh > 180.0) dh = 360.0 - dh;
    dh /= 180.0;
    const double ds = p.saturation - color.hsv.saturation;
    const double dv = p.value - color.hsv.value;
    return 2.0 * dh * dh + ds * ds + dv * dv;
}

std::size_t quantize_pixel(Rgb pixel, const Palette& palette, ColorSpace space) {
    std::size_t best = 0;
    double best_d = color_distance_sq(pixel, palette[0], space);
    for (std::size_t i = 1; i < palette.size(); ++i) {
        const double d = color_distance_sq(pixel, palette[i], space);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

ColorHistogram::ColorHistogram(std::vector<double> bins, std::uint64_t pixel_count)
    : bins_(std::move(bins)), pixel_count_(pixel_count) {
    for (double b : bins_) {
        if (!(b >= 0.0 && b <= 1.0)) throw Error(ErrorCode::InvalidArgument, "histogram bin outside [0,1]");
    }
    if (pixel_count_ > 0) {
        const double sum = std::accumulate(bins_.begin(), bins_.end(), 0.0);
        if (std::abs(sum - 1.0) > 1e-9) {
            throw Error(ErrorCode::InvalidArgument, "histogram bins do not sum to 1");
        }
    }
}

std::vector<std::uint64_t> count_colors(const Image& image, const Palette& palette, ColorSpace space) {
    std::vector<std::uint64_t> counts(palette.size(), 0);
    for (const Rgb& p : image.pixels()) {
        ++counts[quantize_pixel(p, palette, space)];
    }
    return counts;
}

ColorHistogram compute_histogram(const Image& image, const Palette& palette, ColorSpace space,
                                 double dominance_threshold) {
    if (image.pixel_count() == 0) throw Error(ErrorCode::EmptyImage, "image has no pixels");
    if (!(dominance_threshold >= 0.0 && dominance_threshold <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "dominance threshold must lie in [0,1]");
    }

    const auto counts = count_colors(image, palette, space);
    const double total = static_cast<double>(image.pixel_count());
    const std::uint64_t max_count = *std::max_element(counts.begin(), counts.end());

    // A threshold above every fraction would leave nothing; the most frequent
    // colors are always dominant.
    std::vector<std::uint64_t> kept(counts.size(), 0);
    std::uint64_t kept_total = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const bool dominant = counts[i] > 0 &&
                              (static_cast<double>(counts[i]) / total >= dominance_threshold ||
                               counts[i] == max_count);
        if (dominant) {
            kept[i] = counts[i];
            kept_total += counts[i];
        }
    }

    std::vector<double> bins(counts.size(), 0.0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        bins[i] = static_cast<double>(kept[i]) / static_cast<double>(kept_total);
    }
    return ColorHistogram(std::move(bins), image.pixel_count());
}

}  // namespace fuzzyseek
