#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fuzzyseek/signature.hpp"

namespace fuzzyseek {

/// Largest weight a single histogram block can carry (1.0 + 100).
inline constexpr double kMaxBlockWeight = 101.0;

struct FhdParams {
    /// Spread of the difference membership 1 - exp(-alpha * d^2); must be > 0.
    double alpha = 1.0;
    /// Divide component differences by kMaxBlockWeight before the membership.
    bool normalize = false;

    void validate() const;
    friend bool operator==(const FhdParams&, const FhdParams&) = default;
};

/// Fuzzy cardinality of the difference fuzzy set between two weight vectors.
struct FhdDistribution {
    std::vector<double> memberships;  // mu_i per component, input order
    std::vector<double> card;         // grade of "exactly k components differ", k = 0..n
    std::size_t k_star = 0;           // smallest k maximizing card[k]
    double sigma_count = 0.0;         // sum of memberships

    friend bool operator==(const FhdDistribution&, const FhdDistribution&) = default;
};

/// mu_i = 1 - exp(-alpha (x_i - y_i)^2). Throws DimensionMismatch.
std::vector<double> difference_memberships(std::span<const double> x, std::span<const double> y,
                                           const FhdParams& params);

/// card[k] = min(mu_(k), 1 - mu_(k+1)) over the memberships sorted in
/// descending order, with mu_(0) = 1 and mu_(n+1) = 0.
FhdDistribution fuzzy_cardinality(std::span<const double> memberships);

/// Counts one evaluation on both the global and the calling thread's counter.
FhdDistribution fhd(const WeightVector& x, const WeightVector& y, const FhdParams& params);

/// Lexicographic on (k_star, sigma_count).
std::weak_ordering fhd_compare(const FhdDistribution& a, const FhdDistribution& b);

/// Evaluation counters for fhd(). The global total is exact once concurrent
/// work has joined; the thread-local one is what per-operation counters use.
namespace fhd_counter {
std::uint64_t total() noexcept;
std::uint64_t this_thread() noexcept;
}  // namespace fhd_counter

/// Number of fhd() calls made on this thread since construction.
class FhdEvalScope {
public:
    FhdEvalScope() noexcept : start_(fhd_counter::this_thread()) {}
    std::uint64_t count() const noexcept { return fhd_counter::this_thread() - start_; }

private:
    std::uint64_t start_;
};

}  // namespace fuzzyseek
