#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "xicor/parallel.hpp"
#include "xicor/xi.hpp"

namespace xicor {

/// Standard normal CDF via the complementary error function,
/// Phi(z) = erfc(-z/sqrt(2))/2. Keeps full relative precision in the left
/// tail, absolute error well under 1e-10 everywhere.
inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z * 0.7071067811865475244);
}

/// Plug-in estimate of the null variance of sqrt(n) xi_n, built from sorted
/// right ranks u, their prefix sums v, and left-rank products:
///   a = n^-4 sum (2n-2i+1) u_i^2     b = n^-5 sum (v_i + (n-i) u_i)^2
///   c = n^-3 sum (2n-2i+1) u_i       d = n^-3 sum L_i (n - L_i)
///   tau2 = (a - 2b + c^2) / d^2
/// The sums are exact 128-bit integers; only the final divisions round.
struct TauSquaredEstimate {
    double value = 0.0;
    double a_n = 0.0;
    double b_n = 0.0;
    double c_n = 0.0;
    double d_n = 0.0;
};

namespace detail {

// The 128-bit numerator below needs ~6 log2(n) + 3 bits.
inline constexpr std::size_t kMaxTauExactN = 1'000'000;

}  // namespace detail

inline TauSquaredEstimate tau_squared_hat(std::span<const double> ys) {
    const std::size_t n = ys.size();
    if (n < 2) throw SampleTooSmallError(n);
    if (n > detail::kMaxTauExactN)
        throw DomainError("sample too large for exact tau^2 arithmetic");
    const GlobalRanks ranks = global_y_ranks(ys);

    std::vector<std::int64_t> u(ranks.r);
    std::sort(u.begin(), u.end());

    const auto ni = static_cast<std::int64_t>(n);
    __int128 sum_a = 0, sum_b = 0, sum_c = 0, sum_d = 0;
    std::int64_t prefix = 0;
    for (std::size_t idx = 0; idx < n; ++idx) {
        const std::int64_t i = static_cast<std::int64_t>(idx) + 1;  // 1-based
        const std::int64_t weight = 2 * ni - 2 * i + 1;
        prefix += u[idx];
        const std::int64_t inner = prefix + (ni - i) * u[idx];
        sum_a += static_cast<__int128>(weight) * u[idx] * u[idx];
        sum_b += static_cast<__int128>(inner) * inner;
        sum_c += static_cast<__int128>(weight) * u[idx];
        sum_d += static_cast<__int128>(ranks.l[idx]) * (ni - ranks.l[idx]);
    }
    if (sum_d == 0) throw ConstantInputError('y');

    // a - 2b + c^2 = (A n^2 - 2 B n + C^2) / n^6 and d^2 = D^2 / n^6, so the
    // cancellation-prone difference is carried out exactly in integers.
    const __int128 numerator = sum_a * ni * ni - 2 * sum_b * ni + sum_c * sum_c;
    const __int128 denominator = sum_d * sum_d;

    const long double nf = static_cast<long double>(n);
    const long double n3 = nf * nf * nf;
    TauSquaredEstimate est;
    est.a_n = static_cast<double>(static_cast<long double>(sum_a) / (n3 * nf));
    est.b_n = static_cast<double>(static_cast<long double>(sum_b) / (n3 * nf * nf));
    est.c_n = static_cast<double>(static_cast<long double>(sum_c) / n3);
    est.d_n = static_cast<double>(static_cast<long double>(sum_d) / n3);
    est.value = static_cast<double>(static_cast<long double>(numerator) /
                                    static_cast<long double>(denominator));
    return est;
}

enum class TestMethod { asymptotic_continuous, asymptotic_general, permutation };
enum class TestStatistic { xi, xi_symmetrized };

struct TestResult {
    double statistic = 0.0;
    std::size_t n = 0;
    double variance = 0.0;  // tau^2 used: fixed 2/5, estimated, or permutation-based
    double z = 0.0;         // sqrt(n) * statistic / tau
    double p_value = 1.0;   // one-sided right tail
    TestMethod method = TestMethod::asymptotic_continuous;
    std::optional<std::size_t> n_permutations;
    std::optional<std::uint64_t> seed;
};

namespace detail {

inline constexpr double kTauFloor = 1e-12;

inline double right_tail_p(double z) { return 0.5 * std::erfc(z * 0.7071067811865475244); }

}  // namespace detail

/// Asymptotic one-sided test of independence: sqrt(n) xi_n is approximately
/// N(0, tau^2) under the null. With y declared continuous tau^2 = 2/5
/// exactly; otherwise tau^2 is estimated from the y values. Declaring
/// continuous y in the presence of duplicates misstates the variance, so it
/// is refused unless forced.
inline TestResult test_asymptotic(const PairedSample& sample, bool y_continuous,
                                  std::uint64_t seed, bool force_continuous = false) {
    if (y_continuous && !force_continuous && has_ties(sample.ys))
        throw DomainError("y has tied values; drop --y-continuous or force it");

    const XiResult stat = xi(sample, seed);
    double tau2;
    TestMethod method;
    if (y_continuous) {
        tau2 = 0.4;
        method = TestMethod::asymptotic_continuous;
    } else {
        tau2 = tau_squared_hat(sample.ys).value;
        if (tau2 <= detail::kTauFloor)
            throw VarianceDegenerateError("estimated tau^2 is numerically zero");
        method = TestMethod::asymptotic_general;
    }

    TestResult result;
    result.statistic = stat.value;
    result.n = sample.size();
    result.variance = tau2;
    result.z = std::sqrt(static_cast<double>(sample.size())) * stat.value / std::sqrt(tau2);
    result.p_value = detail::right_tail_p(result.z);
    result.method = method;
    result.seed = seed;
    return result;
}

/// Permutation test: ys is reshuffled against xs n_permutations times with
/// per-replicate sub-seeds, and the add-one estimator
/// p = (1 + #{permuted >= observed}) / (n_permutations + 1) keeps p > 0.
/// Replicate k draws from derive_seed(seed, k); the observed statistic uses
/// stream 0, so the result is identical for any thread count.
inline TestResult test_permutation(const PairedSample& sample, TestStatistic statistic,
                                   std::size_t n_permutations, std::uint64_t seed,
                                   unsigned threads = 0) {
    if (n_permutations < 1) throw DomainError("need at least one permutation");
    const std::size_t n = sample.size();

    const auto evaluate_full = [&](const PairedSample& s, std::uint64_t tie_seed) {
        return statistic == TestStatistic::xi ? xi(s, tie_seed).value
                                              : xi_symmetrized(s, tie_seed);
    };
    const double observed = evaluate_full(sample, derive_seed(seed, 0));

    std::vector<double> permuted(n_permutations);
    if (statistic == TestStatistic::xi) {
        // Permutations only rearrange the y multiset, so the global y-ranks
        // and the denominator sum l(n-l) are fixed; a replicate composes its
        // shuffle with the x-arrangement in O(n). Values are identical to the
        // full evaluation because the same integers reach the same division.
        const GlobalRanks global = global_y_ranks(sample.ys);
        const auto ni = static_cast<std::int64_t>(n);
        std::int64_t sum_l = 0;
        for (std::int64_t l : global.l) sum_l += l * (ni - l);
        const bool x_tied = has_ties(sample.xs);
        std::vector<std::size_t> shared_order;
        if (!x_tied) shared_order = x_order(sample, 0);  // unique for every seed

        parallel_for(n_permutations, threads, [&](std::size_t k) {
            Rng rng(derive_seed(seed, k + 1));
            std::vector<std::size_t> idx(n);
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            rng.shuffle(idx);
            const std::uint64_t tie_seed = rng.next();
            std::vector<std::size_t> local_order;
            if (x_tied) local_order = x_order(sample, tie_seed);
            const auto& order = x_tied ? local_order : shared_order;

            std::int64_t sum_abs = 0;
            std::int64_t prev = global.r[idx[order[0]]];
            for (std::size_t i = 1; i < n; ++i) {
                const std::int64_t current = global.r[idx[order[i]]];
                sum_abs += std::abs(current - prev);
                prev = current;
            }
            permuted[k] = detail::one_minus_ratio(ni * sum_abs, 2 * sum_l);
        });
    } else {
        parallel_for(n_permutations, threads, [&](std::size_t k) {
            Rng rng(derive_seed(seed, k + 1));
            std::vector<double> ys(sample.ys);
            rng.shuffle(ys);
            permuted[k] = evaluate_full(PairedSample(sample.xs, std::move(ys)), rng.next());
        });
    }

    std::size_t at_least = 0;
    double mean = 0.0;
    for (double v : permuted) {
        if (v >= observed) ++at_least;
        mean += v;
    }
    mean /= static_cast<double>(n_permutations);
    double ss = 0.0;
    for (double v : permuted) ss += (v - mean) * (v - mean);
    const double perm_var =
        n_permutations > 1 ? ss / static_cast<double>(n_permutations - 1) : 0.0;

    TestResult result;
    result.statistic = observed;
    result.n = sample.size();
    // tau^2 implied by the permutation distribution of xi_n
    result.variance = static_cast<double>(sample.size()) * perm_var;
    result.z = result.variance > 0.0
                   ? std::sqrt(static_cast<double>(sample.size())) * observed /
                         std::sqrt(result.variance)
                   : std::numeric_limits<double>::quiet_NaN();
    result.p_value = static_cast<double>(1 + at_least) / static_cast<double>(n_permutations + 1);
    result.method = TestMethod::permutation;
    result.n_permutations = n_permutations;
    result.seed = seed;
    return result;
}

}  // namespace xicor
