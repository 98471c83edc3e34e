#include <gtest/gtest.h>

#include <random>

#include "fuzzyseek/error.hpp"
#include "fuzzyseek/signature.hpp"
#include "oracles.hpp"

using namespace fuzzyseek;

namespace {

FuzzySignature sig2(double a, double b) { return FuzzySignature({2, 1}, {a, b}); }

ColorHistogram one_hot(std::size_t bins, std::size_t j, double other_mass = 0.0, std::size_t other = 0) {
    std::vector<double> h(bins, 0.0);
    h[j] = 1.0 - other_mass;
    if (other_mass > 0) h[other] = other_mass;
    return ColorHistogram(std::move(h), 100);
}

}  // namespace

TEST(SignatureFromHistogram, PlacesValueAtCeilingPosition) {
    const auto sig = signature_from_histogram(one_hot(3, 0, 0.35, 1), 10);
    const auto block = sig.block(1);
    for (std::size_t k = 0; k < 10; ++k) EXPECT_EQ(block[k], k == 3 ? 0.35 : 0.0) << k;  // position 4
    for (double v : sig.block(2)) EXPECT_EQ(v, 0.0);
}

TEST(SignatureFromHistogram, FullBinLandsOnLastPosition) {
    const auto sig = signature_from_histogram(one_hot(4, 2), 10);
    EXPECT_EQ(sig.block(2)[9], 1.0);
    EXPECT_EQ(weight_vector(sig)[2], 101.0);
}

TEST(SignatureFromHistogram, ExactMultiplesDoNotRoundUp) {
    // 0.3 * 10 is exactly 3 in the decimal reading.
    const auto sig = signature_from_histogram(ColorHistogram({0.3, 0.7}, 10), 10);
    EXPECT_EQ(sig.block(0)[2], 0.3);
    EXPECT_EQ(sig.block(1)[6], 0.7);
}

TEST(SignatureFromHistogram, RejectsZeroLength) {
    EXPECT_THROW(signature_from_histogram(one_hot(2, 0), 0), Error);
}

TEST(SignatureFromHistogramProperty, NonzeroCountAndBlockStructure) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto h = oracle::random_histogram(rng, 16, 6);
        const std::uint32_t len = 1 + rng() % 20;
        const auto sig = signature_from_histogram(h, len);
        std::size_t nonzero_bins = 0;
        std::size_t nonzero_components = 0;
        for (std::size_t j = 0; j < h.size(); ++j) {
            nonzero_bins += h[j] > 0;
            std::size_t in_block = 0;
            for (double v : sig.block(j)) in_block += v != 0.0;
            ASSERT_LE(in_block, 1u);
            nonzero_components += in_block;
        }
        ASSERT_EQ(nonzero_bins, nonzero_components);
    }
}

TEST(Lattice, ConjunctionAndDisjunction) {
    EXPECT_EQ(conjunction(sig2(0.2, 0.8), sig2(0.5, 0.3)), sig2(0.2, 0.3));
    EXPECT_EQ(disjunction(sig2(0.2, 0.8), sig2(0.5, 0.3)), sig2(0.5, 0.8));
    const auto a = sig2(0.4, 0.9);
    const FuzzySignature zero({2, 1});
    EXPECT_EQ(conjunction(a, a), a);
    EXPECT_EQ(disjunction(a, a), a);
    EXPECT_EQ(conjunction(a, zero), zero);
    EXPECT_EQ(disjunction(a, zero), a);
}

TEST(Lattice, DimensionMismatch) {
    const FuzzySignature a({2, 1});
    const FuzzySignature b({1, 2});
    try {
        conjunction(a, b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
    EXPECT_THROW(disjunction(a, b), Error);
    EXPECT_THROW(contains(a, b), Error);
}

TEST(Contains, Examples) {
    EXPECT_TRUE(contains(sig2(0.5, 0.8), sig2(0.5, 0.3)));
    EXPECT_FALSE(contains(sig2(0.5, 0.8), sig2(0.6, 0.3)));
    EXPECT_TRUE(contains(sig2(0.5, 0.8), sig2(0.5, 0.8)));
}

TEST(LatticeProperty, AlgebraicLaws) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto a = oracle::random_signature(rng);
        const auto b = oracle::random_signature(rng);
        const auto c = oracle::random_signature(rng);
        ASSERT_EQ(conjunction(a, b), conjunction(b, a));
        ASSERT_EQ(disjunction(a, b), disjunction(b, a));
        ASSERT_EQ(conjunction(conjunction(a, b), c), conjunction(a, conjunction(b, c)));
        ASSERT_EQ(disjunction(disjunction(a, b), c), disjunction(a, disjunction(b, c)));
        const auto ab = disjunction(a, b);
        ASSERT_TRUE(contains(ab, a));
        ASSERT_TRUE(contains(ab, b));
        ASSERT_TRUE(contains(a, conjunction(a, b)));
    }
}

TEST(WeightVector, Examples) {
    std::vector<double> block(10, 0.0);
    block[3] = 0.35;
    EXPECT_EQ(weight_vector(FuzzySignature({1, 10}, block))[0], 40.35);
    EXPECT_EQ(weight_vector(FuzzySignature({1, 10}))[0], 0.0);
    std::vector<double> full(10, 0.0);
    full[9] = 1.0;
    EXPECT_EQ(weight_vector(FuzzySignature({1, 10}, full))[0], 101.0);
}

TEST(WeightVector, PositionStepAddsHundredOverLength) {
    for (std::uint32_t len : {1u, 4u, 10u, 16u}) {
        for (std::uint32_t k = 1; k < len; ++k) {
            std::vector<double> lo(len, 0.0), hi(len, 0.0);
            lo[k - 1] = 0.5;
            hi[k] = 0.5;
            const double step = weight_vector(FuzzySignature({1, len}, hi))[0] -
                                weight_vector(FuzzySignature({1, len}, lo))[0];
            EXPECT_NEAR(step, 100.0 / len, 1e-12);
            EXPECT_GT(step, 0.0);
        }
    }
}

TEST(WeightVectorProperty, ZeroBlocksHaveZeroWeight) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto sig = oracle::random_signature(rng, 8, 5, 1 + rng() % 12);
        const auto w = weight_vector(sig);
        for (std::size_t j = 0; j < sig.shape().blocks; ++j) {
            bool zero = true;
            for (double v : sig.block(j)) zero = zero && v == 0.0;
            ASSERT_EQ(w[j] == 0.0, zero);
        }
    }
}

TEST(SignatureSerialization, RoundTripAndTruncation) {
    std::mt19937_64 rng(29);
    const auto sig = oracle::random_signature(rng);
    std::string buf;
    append_signature(buf, sig);
    EXPECT_EQ(buf.size(), 8 + sig.size() * 8);
    EXPECT_EQ(buf.substr(0, 8), std::string("\x10\0\0\0\x0a\0\0\0", 8));
    const auto* data = reinterpret_cast<const unsigned char*>(buf.data());
    std::size_t pos = 0;
    EXPECT_EQ(read_signature({data, buf.size()}, pos), sig);
    EXPECT_EQ(pos, buf.size());
    pos = 0;
    EXPECT_THROW(read_signature({data, buf.size() - 1}, pos), Error);
}

TEST(FuzzySignature, RejectsOutOfRangeValues) {
    EXPECT_THROW(FuzzySignature({1, 2}, {0.5, 1.5}), Error);
    EXPECT_THROW(FuzzySignature({1, 2}, {0.5}), Error);
}
