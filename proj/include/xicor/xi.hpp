#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>

#include "xicor/ranks.hpp"
#include "xicor/sample.hpp"

namespace xicor {

enum class XiFormula { no_tie, general };

struct XiResult {
    double value = 0.0;
    std::size_t n = 0;
    bool x_had_ties = false;
    bool y_had_ties = false;
    std::optional<std::uint64_t> seed_used;  // tie-break seed, present iff x had ties
    XiFormula formula = XiFormula::general;

    // Exact integer pieces: value = 1 - n*sum_abs_diff / (2*sum_l_term).
    std::int64_t sum_abs_diff = 0;  // sum_{i<n} |r_{i+1} - r_i|
    std::int64_t sum_l_term = 0;    // sum_i l_i (n - l_i)
};

namespace detail {

// Sums stay inside int64 and convert exactly to long double up to this n.
inline constexpr std::size_t kMaxExactN = 2'000'000;

inline void check_size(std::size_t n) {
    if (n > kMaxExactN)
        throw DomainError("sample too large for exact integer rank arithmetic");
}

// Correctly rounded 1 - num/den for exactly representable integer operands.
inline double one_minus_ratio(std::int64_t num, std::int64_t den) {
    return static_cast<double>(1.0L - static_cast<long double>(num) / static_cast<long double>(den));
}

}  // namespace detail

/// The rank correlation built from a prepared rank profile. Always evaluates
/// the tie-general form 1 - n*sum|dr| / (2*sum l(n-l)); when y has no ties
/// the denominator collapses to n(n^2-1)/3 and the value coincides with the
/// no-tie form 1 - 3*sum|dr|/(n^2-1), which is only reported, never branched on.
inline XiResult xi_from_profile(const RankProfile& profile, std::size_t n, bool x_had_ties) {
    detail::check_size(n);
    const auto ni = static_cast<std::int64_t>(n);
    std::int64_t sum_abs = 0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        sum_abs += std::abs(profile.r[i + 1] - profile.r[i]);
    std::int64_t sum_l = 0;
    bool y_had_ties = false;
    for (std::size_t i = 0; i < n; ++i) {
        sum_l += profile.l[i] * (ni - profile.l[i]);
        // r_i + l_i = n + multiplicity of y_(i), so any duplicate exceeds n+1
        y_had_ties = y_had_ties || profile.r[i] + profile.l[i] != ni + 1;
    }
    if (sum_l == 0) throw ConstantInputError('y');

    XiResult result;
    result.value = detail::one_minus_ratio(ni * sum_abs, 2 * sum_l);
    result.n = n;
    result.x_had_ties = x_had_ties;
    result.y_had_ties = y_had_ties;
    result.seed_used = profile.seed_used;
    result.formula = y_had_ties ? XiFormula::general : XiFormula::no_tie;
    result.sum_abs_diff = sum_abs;
    result.sum_l_term = sum_l;
    return result;
}

/// xi_n(X,Y): how well y is predicted by x, as a function of ranks only.
/// Ties among the x values are broken uniformly at random from `seed`.
inline XiResult xi(const PairedSample& sample, std::uint64_t seed) {
    RankProfile profile = rank_profile(sample, seed);
    return xi_from_profile(profile, sample.size(), profile.seed_used.has_value());
}

/// max(xi(X,Y), xi(Y,X)) with independent tie-break sub-streams per direction.
inline double xi_symmetrized(const PairedSample& sample, std::uint64_t seed) {
    const double forward = xi(sample, derive_seed(seed, 0)).value;
    double backward;
    try {
        backward = xi(sample.swapped(), derive_seed(seed, 1)).value;
    } catch (const ConstantInputError&) {
        throw ConstantInputError('x');
    }
    return std::max(forward, backward);
}

struct TieAverage {
    double mean = 0.0;
    double sd = 0.0;
};

/// Monte Carlo average of xi over independent tie-break draws (enumerating
/// all rearrangements is exponential in the tie multiplicities). Draw k uses
/// the sub-seed derive_seed(seed, k). Without x ties there is nothing to
/// average and the sd is exactly zero.
inline TieAverage xi_tie_averaged(const PairedSample& sample, std::size_t n_draws,
                                  std::uint64_t seed) {
    if (n_draws < 1) throw DomainError("n_draws must be >= 1");
    if (!has_ties(sample.xs)) return TieAverage{xi(sample, seed).value, 0.0};

    std::vector<double> values(n_draws);
    for (std::size_t k = 0; k < n_draws; ++k)
        values[k] = xi(sample, derive_seed(seed, k)).value;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n_draws);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = n_draws > 1 ? std::sqrt(ss / static_cast<double>(n_draws - 1)) : 0.0;
    return TieAverage{mean, sd};
}

/// Limit value of xi for X ~ Bernoulli(p), Z ~ Bernoulli(p'), Y = XZ:
/// p'(1-p) / (1 - p p'). Evaluated in extended precision so representable
/// results round correctly.
inline double population_xi_bernoulli_product(double p, double p_prime) {
    if (!(p > 0.0 && p < 1.0) || !(p_prime > 0.0 && p_prime < 1.0))
        throw DomainError("p and p' must lie strictly inside (0,1)");
    const long double pl = p, ql = p_prime;
    return static_cast<double>(ql * (1.0L - pl) / (1.0L - pl * ql));
}

}  // namespace xicor
