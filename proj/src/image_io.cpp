#include "fuzzyseek/image_io.hpp"

#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "fuzzyseek/error.hpp"

namespace fuzzyseek {
namespace {

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::CorruptFile, "cannot open image " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---- PPM -------------------------------------------------------------------

class PpmReader {
public:
    explicit PpmReader(std::span<const unsigned char> bytes) : bytes_(bytes) {}

    // Whitespace and '#' comments may appear between header tokens.
    void skip_separators() {
        while (pos_ < bytes_.size()) {
            const unsigned char c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
            } else if (std::isspace(c)) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    unsigned long next_uint() {
        skip_separators();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
            throw Error(ErrorCode::CorruptFile, "PPM: expected an unsigned integer");
        }
        unsigned long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 0xFFFFFFFFul) throw Error(ErrorCode::CorruptFile, "PPM: integer overflow");
            ++pos_;
        }
        return value;
    }

    std::size_t pos() const { return pos_; }
    void advance(std::size_t n) { pos_ += n; }
    std::span<const unsigned char> bytes() const { return bytes_; }

private:
    std::span<const unsigned char> bytes_;
    std::size_t pos_ = 2;
};

std::uint8_t rescale(unsigned long sample, unsigned long maxval) {
    if (sample > maxval) throw Error(ErrorCode::CorruptFile, "PPM: sample exceeds maxval");
    if (maxval == 255) return static_cast<std::uint8_t>(sample);
    return static_cast<std::uint8_t>((sample * 255 + maxval / 2) / maxval);
}

// ---- PNG -------------------------------------------------------------------

Image decode_png(std::span<const unsigned char> bytes) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
        throw Error(ErrorCode::CorruptFile, std::string("PNG: ") + img.message);
    }
    img.format = PNG_FORMAT_RGB;
    std::vector<unsigned char> buffer(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, buffer.data(), 0, nullptr)) {
        std::string message = img.message;
        png_image_free(&img);
        throw Error(ErrorCode::CorruptFile, "PNG: " + message);
    }
    std::vector<Rgb> pixels(std::size_t(img.width) * img.height);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        pixels[i] = {buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]};
    }
    return Image(img.width, img.height, std::move(pixels));
}

// ---- JPEG ------------------------------------------------------------------

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* mgr = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, mgr->message);
    std::longjmp(mgr->jump, 1);
}

// Kept free of C++ objects with destructors so longjmp never skips one.
bool decode_jpeg_raw(std::span<const unsigned char> bytes, std::vector<unsigned char>& out,
                     unsigned& width, unsigned& height, char* message) {
    jpeg_decompress_struct cinfo;
    JpegErrorManager err;
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    err.message[0] = '\0';
    if (setjmp(err.jump)) {
        std::memcpy(message, err.message, JMSG_LENGTH_MAX);
        jpeg_destroy_decompress(&cinfo);
        return false;
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    width = cinfo.output_width;
    height = cinfo.output_height;
    out.resize(std::size_t(width) * height * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = out.data() + std::size_t(cinfo.output_scanline) * width * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return true;
}

Image decode_jpeg(std::span<const unsigned char> bytes) {
    std::vector<unsigned char> buffer;
    unsigned width = 0;
    unsigned height = 0;
    char message[JMSG_LENGTH_MAX] = {};
    if (!decode_jpeg_raw(bytes, buffer, width, height, message)) {
        throw Error(ErrorCode::CorruptFile, std::string("JPEG: ") + message);
    }
    std::vector<Rgb> pixels(std::size_t(width) * height);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        pixels[i] = {buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]};
    }
    return Image(width, height, std::move(pixels));
}

// ---- BMP -------------------------------------------------------------------

std::uint32_t le32(std::span<const unsigned char> b, std::size_t at) {
    return std::uint32_t(b[at]) | std::uint32_t(b[at + 1]) << 8 | std::uint32_t(b[at + 2]) << 16 |
           std::uint32_t(b[at + 3]) << 24;
}

std::uint16_t le16(std::span<const unsigned char> b, std::size_t at) {
    return static_cast<std::uint16_t>(b[at] | b[at + 1] << 8);
}

Image decode_bmp(std::span<const unsigned char> bytes) {
    if (bytes.size() < 54) throw Error(ErrorCode::CorruptFile, "BMP: truncated header");
    const std::uint32_t data_offset = le32(bytes, 10);
    const std::uint32_t dib_size = le32(bytes, 14);
    if (dib_size < 40) throw Error(ErrorCode::UnsupportedFormat, "BMP: only BITMAPINFOHEADER and later");
    const auto raw_width = static_cast<std::int32_t>(le32(bytes, 18));
    const auto raw_height = static_cast<std::int32_t>(le32(bytes, 22));
    const std::uint16_t bpp = le16(bytes, 28);
    const std::uint32_t compression = le32(bytes, 30);
    if (compression != 0) throw Error(ErrorCode::UnsupportedFormat, "BMP: compressed bitmaps");
    if (bpp != 8 && bpp != 24 && bpp != 32) {
        throw Error(ErrorCode::UnsupportedFormat, "BMP: unsupported bit depth " + std::to_string(bpp));
    }
    if (raw_width <= 0 || raw_height == 0) throw Error(ErrorCode::CorruptFile, "BMP: invalid dimensions");

    const bool top_down = raw_height < 0;
    const std::size_t width = static_cast<std::size_t>(raw_width);
    const std::size_t height = static_cast<std::size_t>(top_down ? -std::int64_t(raw_height) : raw_height);

    std::vector<Rgb> color_table;
    if (bpp == 8) {
        std::uint32_t used = le32(bytes, 46);
        if (used == 0) used = 256;
        const std::size_t table_at = 14 + dib_size;
        if (used > 256 || table_at + std::size_t(used) * 4 > bytes.size()) {
            throw Error(ErrorCode::CorruptFile, "BMP: bad color table");
        }
        for (std::uint32_t i = 0; i < used; ++i) {
            const std::size_t at = table_at + i * 4;
            color_table.push_back({bytes[at + 2], bytes[at + 1], bytes[at]});
        }
    }

    const std::size_t stride = ((width * bpp + 31) / 32) * 4;
    if (data_offset > bytes.size() || (bytes.size() - data_offset) / stride < height) {
        throw Error(ErrorCode::CorruptFile, "BMP: truncated pixel data");
    }
    std::vector<Rgb> pixels(width * height);
    for (std::size_t row = 0; row < height; ++row) {
        const std::size_t y = top_down ? row : height - 1 - row;
        const unsigned char* src = bytes.data() + data_offset + row * stride;
        for (std::size_t x = 0; x < width; ++x) {
            Rgb& dst = pixels[y * width + x];
            if (bpp == 8) {
                const unsigned idx = src[x];
                if (idx >= color_table.size()) throw Error(ErrorCode::CorruptFile, "BMP: palette index");
                dst = color_table[idx];
            } else {
                const unsigned char* p = src + x * (bpp / 8);
                dst = {p[2], p[1], p[0]};
            }
        }
    }
    return Image(width, height, std::move(pixels));
}

}  // namespace

ImageFormat detect_format(std::span<const unsigned char> head) {
    static constexpr unsigned char png_magic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    if (head.size() >= 8 && std::memcmp(head.data(), png_magic, 8) == 0) return ImageFormat::Png;
    if (head.size() >= 3 && head[0] == 0xFF && head[1] == 0xD8 && head[2] == 0xFF) return ImageFormat::Jpeg;
    if (head.size() >= 2 && head[0] == 'B' && head[1] == 'M') return ImageFormat::Bmp;
    if (head.size() >= 2 && head[0] == 'P' && head[1] == '3') return ImageFormat::PpmAscii;
    if (head.size() >= 2 && head[0] == 'P' && head[1] == '6') return ImageFormat::PpmBinary;
    return ImageFormat::Unknown;
}

Image decode_ppm(std::span<const unsigned char> bytes) {
    const ImageFormat format = detect_format(bytes);
    if (format != ImageFormat::PpmAscii && format != ImageFormat::PpmBinary) {
        throw Error(ErrorCode::UnsupportedFormat, "not a P3/P6 PPM");
    }
    PpmReader reader(bytes);
    const unsigned long width = reader.next_uint();
    const unsigned long height = reader.next_uint();
    const unsigned long maxval = reader.next_uint();
    if (width == 0 || height == 0) throw Error(ErrorCode::CorruptFile, "PPM: zero dimension");
    if (maxval == 0 || maxval > 65535) throw Error(ErrorCode::CorruptFile, "PPM: maxval out of range");
    if (width * height > (std::size_t(1) << 32)) throw Error(ErrorCode::CorruptFile, "PPM: image too large");

    std::vector<Rgb> pixels(width * height);
    if (format == ImageFormat::PpmAscii) {
        for (auto& p : pixels) {
            const auto r = reader.next_uint();
            const auto g = reader.next_uint();
            const auto b = reader.next_uint();
            p = {rescale(r, maxval), rescale(g, maxval), rescale(b, maxval)};
        }
    } else {
        // Exactly one whitespace byte separates maxval from the raster.
        if (reader.pos() >= bytes.size() || !std::isspace(bytes[reader.pos()])) {
            throw Error(ErrorCode::CorruptFile, "PPM: missing raster separator");
        }
        reader.advance(1);
        const std::size_t sample_bytes = maxval < 256 ? 1 : 2;
        const std::size_t need = pixels.size() * 3 * sample_bytes;
        if (bytes.size() - reader.pos() < need) throw Error(ErrorCode::CorruptFile, "PPM: truncated raster");
        const unsigned char* src = bytes.data() + reader.pos();
        auto sample = [&](std::size_t i) -> unsigned long {
            if (sample_bytes == 1) return src[i];
            return (unsigned long)src[2 * i] << 8 | src[2 * i + 1];
        };
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            pixels[i] = {rescale(sample(3 * i), maxval), rescale(sample(3 * i + 1), maxval),
                         rescale(sample(3 * i + 2), maxval)};
        }
    }
    return Image(width, height, std::move(pixels));
}

Image decode_image_bytes(std::span<const unsigned char> bytes) {
    switch (detect_format(bytes)) {
    case ImageFormat::Png: return decode_png(bytes);
    case ImageFormat::Jpeg: return decode_jpeg(bytes);
    case ImageFormat::Bmp: return decode_bmp(bytes);
    case ImageFormat::PpmAscii:
    case ImageFormat::PpmBinary: return decode_ppm(bytes);
    case ImageFormat::Unknown: break;
    }
    throw Error(ErrorCode::UnsupportedFormat, "unrecognized image format");
}

Image decode_image(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    try {
        return decode_image_bytes(bytes);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.message());
    }
}

std::string encode_ppm_ascii(const Image& image) {
    std::string out = "P3\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
    for (std::size_t y = 0; y < image.height(); ++y) {
        for (std::size_t x = 0; x < image.width(); ++x) {
            const Rgb p = image.at(x, y);
            if (x > 0) out += ' ';
            out += std::to_string(p.r) + ' ' + std::to_string(p.g) + ' ' + std::to_string(p.b);
        }
        out += '\n';
    }
    return out;
}

void write_ppm(const Image& image, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    const std::string text = encode_ppm_ascii(image);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace fuzzyseek
