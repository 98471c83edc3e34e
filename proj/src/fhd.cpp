#include "fuzzyseek/fhd.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <string>

#include "fuzzyseek/error.hpp"

namespace fuzzyseek {
namespace {

std::atomic<std::uint64_t> g_total_evals{0};
thread_local std::uint64_t t_thread_evals = 0;

}  // namespace

namespace fhd_counter {
std::uint64_t total() noexcept { return g_total_evals.load(std::memory_order_relaxed); }
std::uint64_t this_thread() noexcept { return t_thread_evals; }
}  // namespace fhd_counter

void FhdParams::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw Error(ErrorCode::InvalidArgument, "alpha must be a positive finite number");
    }
}

std::vector<double> difference_memberships(std::span<const double> x, std::span<const double> y,
                                           const FhdParams& params) {
    if (x.size() != y.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "weight vectors differ in length: " + std::to_string(x.size()) + " vs " +
                        std::to_string(y.size()));
    }
    std::vector<double> mu(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double d = x[i] - y[i];
        if (params.normalize) d /= kMaxBlockWeight;
        // -expm1 keeps tiny memberships; large arguments saturate to exactly 1.
        mu[i] = -std::expm1(-params.alpha * d * d);
    }
    return mu;
}

FhdDistribution fuzzy_cardinality(std::span<const double> memberships) {
    const std::size_t n = memberships.size();
    FhdDistribution out;
    out.memberships.assign(memberships.begin(), memberships.end());

    std::vector<double> sorted(memberships.begin(), memberships.end());
    std::stable_sort(sorted.begin(), sorted.end(), std::greater<>());
    // mu(k) for k = 0..n+1 with the boundary grades.
    auto ranked = [&](std::size_t k) -> double {
        if (k == 0) return 1.0;
        if (k > n) return 0.0;
        return sorted[k - 1];
    };

    out.card.resize(n + 1);
    double best = -1.0;
    for (std::size_t k = 0; k <= n; ++k) {
        out.card[k] = std::min(ranked(k), 1.0 - ranked(k + 1));
        if (out.card[k] > best) {
            best = out.card[k];
            out.k_star = k;
        }
    }
    out.sigma_count = 0.0;
    for (double m : memberships) out.sigma_count += m;
    return out;
}

FhdDistribution fhd(const WeightVector& x, const WeightVector& y, const FhdParams& params) {
    auto mu = difference_memberships(x.components(), y.components(), params);
    ++t_thread_evals;
    g_total_evals.fetch_add(1, std::memory_order_relaxed);
    return fuzzy_cardinality(mu);
}

std::weak_ordering fhd_compare(const FhdDistribution& a, const FhdDistribution& b) {
    if (a.k_star != b.k_star) return a.k_star <=> b.k_star;
    if (a.sigma_count < b.sigma_count) return std::weak_ordering::less;
    if (a.sigma_count > b.sigma_count) return std::weak_ordering::greater;
    return std::weak_ordering::equivalent;
}

}  // namespace fuzzyseek
