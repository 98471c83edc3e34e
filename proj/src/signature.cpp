#include "fuzzyseek/signature.hpp"

#include <algorithm>
#include <cmath>

#include "bytes.hpp"
#include "fuzzyseek/error.hpp"

namespace fuzzyseek {
namespace {

void require_same_shape(const FuzzySignature& a, const FuzzySignature& b) {
    if (a.shape() != b.shape()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "signature shapes differ: " + std::to_string(a.shape().blocks) + "x" +
                        std::to_string(a.shape().block_len) + " vs " + std::to_string(b.shape().blocks) +
                        "x" + std::to_string(b.shape().block_len));
    }
}

// ceil(h * len) where h is a ratio of pixel counts. Products that land within
// rounding noise of an integer are snapped first, so 0.3 * 10 maps to 3.
std::uint32_t block_position(double h, std::uint32_t len) {
    double x = h * len;
    const double nearest = std::round(x);
    if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, nearest)) x = nearest;
    const double k = std::ceil(x);
    return static_cast<std::uint32_t>(std::clamp(k, 1.0, double(len)));
}

}  // namespace

FuzzySignature::FuzzySignature(SignatureShape shape) : shape_(shape), values_(shape.size(), 0.0) {}

FuzzySignature::FuzzySignature(SignatureShape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
    if (values_.size() != shape_.size()) {
        throw Error(ErrorCode::InvalidArgument, "signature value count does not match its shape");
    }
    for (double v : values_) {
        if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::InvalidArgument, "signature component outside [0,1]");
    }
}

bool FuzzySignature::is_zero() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

FuzzySignature signature_from_histogram(const ColorHistogram& histogram, std::uint32_t block_len) {
    if (block_len == 0) throw Error(ErrorCode::InvalidArgument, "signature length must be positive");
    const SignatureShape shape{static_cast<std::uint32_t>(histogram.size()), block_len};
    std::vector<double> values(shape.size(), 0.0);
    for (std::size_t j = 0; j < histogram.size(); ++j) {
        const double h = histogram[j];
        if (h <= 0.0) continue;
        values[j * block_len + block_position(h, block_len) - 1] = h;
    }
    return FuzzySignature(shape, std::move(values));
}

FuzzySignature conjunction(const FuzzySignature& a, const FuzzySignature& b) {
    require_same_shape(a, b);
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(a[i], b[i]);
    return FuzzySignature(a.shape(), std::move(out));
}

FuzzySignature disjunction(const FuzzySignature& a, const FuzzySignature& b) {
    FuzzySignature out = a;
    disjoin_into(out, b);
    return out;
}

void disjoin_into(FuzzySignature& acc, const FuzzySignature& other) {
    require_same_shape(acc, other);
    std::vector<double> values(acc.values().begin(), acc.values().end());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::max(values[i], other[i]);
    acc = FuzzySignature(acc.shape(), std::move(values));
}

bool contains(const FuzzySignature& outer, const FuzzySignature& inner) {
    require_same_shape(outer, inner);
    for (std::size_t i = 0; i < outer.size(); ++i) {
        if (std::min(outer[i], inner[i]) != inner[i]) return false;
    }
    return true;
}

WeightVector weight_vector(const FuzzySignature& signature) {
    const auto [blocks, len] = signature.shape();
    std::vector<double> weights(blocks, 0.0);
    for (std::size_t j = 0; j < blocks; ++j) {
        const auto block = signature.block(j);
        double sum = 0.0;
        for (std::size_t k = 1; k <= len; ++k) {
            const double f = block[k - 1];
            if (f != 0.0) sum += f + (double(k) / double(len)) * 100.0;
        }
        weights[j] = sum;
    }
    return WeightVector(std::move(weights));
}

void append_signature(std::string& out, const FuzzySignature& signature) {
    bytes::put_uint<std::uint32_t>(out, signature.shape().blocks);
    bytes::put_uint<std::uint32_t>(out, signature.shape().block_len);
    for (double v : signature.values()) bytes::put_f64(out, v);
}

FuzzySignature read_signature(std::span<const unsigned char> in, std::size_t& pos) {
    SignatureShape shape;
    shape.blocks = bytes::get_uint<std::uint32_t>(in, pos);
    shape.block_len = bytes::get_uint<std::uint32_t>(in, pos);
    bytes::require(in, pos, shape.size() * 8);
    std::vector<double> values(shape.size());
    for (auto& v : values) v = bytes::get_f64(in, pos);
    try {
        return FuzzySignature(shape, std::move(values));
    } catch (const Error& e) {
        throw Error(ErrorCode::CorruptIndex, e.message());
    }
}

}  // namespace fuzzyseek
