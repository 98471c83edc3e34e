#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fuzzyseek/color.hpp"

namespace fuzzyseek {

/// Number of blocks (palette size) and length of each block.
struct SignatureShape {
    std::uint32_t blocks = 0;
    std::uint32_t block_len = 0;

    std::size_t size() const noexcept { return std::size_t(blocks) * block_len; }
    friend bool operator==(const SignatureShape&, const SignatureShape&) = default;
};

inline constexpr std::uint32_t kDefaultSignatureLength = 10;

/// Concatenation of one fuzzy block per palette color. Every component is a
/// membership grade in [0,1].
class FuzzySignature {
public:
    FuzzySignature() = default;
    /// All-zero signature.
    explicit FuzzySignature(SignatureShape shape);
    /// Throws InvalidArgument if the value count or any component is out of range.
    FuzzySignature(SignatureShape shape, std::vector<double> values);

    SignatureShape shape() const noexcept { return shape_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<const double> block(std::size_t j) const {
        return std::span<const double>(values_).subspan(j * shape_.block_len, shape_.block_len);
    }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }
    bool is_zero() const noexcept;

    friend bool operator==(const FuzzySignature&, const FuzzySignature&) = default;

private:
    SignatureShape shape_;
    std::vector<double> values_;
};

/// Per-block weights derived from a signature; the vector FHD operates on.
class WeightVector {
public:
    WeightVector() = default;
    explicit WeightVector(std::vector<double> components) : components_(std::move(components)) {}

    std::span<const double> components() const noexcept { return components_; }
    std::size_t size() const noexcept { return components_.size(); }
    double operator[](std::size_t i) const { return components_[i]; }

    friend bool operator==(const WeightVector&, const WeightVector&) = default;

private:
    std::vector<double> components_;
};

/// Block j carries h_j at 1-based position ceil(h_j * block_len); empty bins
/// give all-zero blocks.
FuzzySignature signature_from_histogram(const ColorHistogram& histogram,
                                        std::uint32_t block_len = kDefaultSignatureLength);

/// Componentwise min. Throws DimensionMismatch.
FuzzySignature conjunction(const FuzzySignature& a, const FuzzySignature& b);
/// Componentwise max. Throws DimensionMismatch.
FuzzySignature disjunction(const FuzzySignature& a, const FuzzySignature& b);
/// In-place max, for folding many signatures into one.
void disjoin_into(FuzzySignature& acc, const FuzzySignature& other);

/// True iff inner <= outer componentwise, i.e. outer AND inner == inner.
bool contains(const FuzzySignature& outer, const FuzzySignature& inner);

/// v_i = sum over nonzero positions k (1-based) of f_k + (k / block_len) * 100.
WeightVector weight_vector(const FuzzySignature& signature);

/// Wire form: blocks u32, block_len u32, then the values as f64, all
/// little-endian.
void append_signature(std::string& out, const FuzzySignature& signature);
/// Reads from `in` at `pos`, advancing it. Throws CorruptIndex on short input.
FuzzySignature read_signature(std::span<const unsigned char> in, std::size_t& pos);

}  // namespace fuzzyseek
