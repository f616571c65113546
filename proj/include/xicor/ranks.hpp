#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "xicor/random.hpp"
#include "xicor/sample.hpp"

namespace xicor {

/// Ranks of the y values after the data has been arranged x-increasing.
/// r[i] counts arranged y values <= y_(i), l[i] counts those >= y_(i).
struct RankProfile {
    std::vector<std::size_t> order;      // x-increasing arrangement of indices
    std::vector<std::int64_t> r;         // right ranks, values in 1..n
    std::vector<std::int64_t> l;         // left ranks, values in 1..n
    std::optional<std::uint64_t> seed_used;  // present only when xs had ties
};

/// Ranks in original index order: r[i] = #{j : y_j <= y_i}, l[i] = #{j : y_j >= y_i}.
struct GlobalRanks {
    std::vector<std::int64_t> r;
    std::vector<std::int64_t> l;
};

inline bool has_ties(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

/// X-increasing arrangement with ties broken uniformly at random: shuffle the
/// indices, then stable-sort by x, so each relative order of equal x values
/// is equally likely. Deterministic given (sample, seed).
inline std::vector<std::size_t> x_order(const PairedSample& sample, std::uint64_t seed) {
    std::vector<std::size_t> order(sample.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);
    std::stable_sort(order.begin(), order.end(), [&xs = sample.xs](std::size_t a, std::size_t b) {
        return xs[a] < xs[b];
    });
    return order;
}

inline GlobalRanks global_y_ranks(std::span<const double> ys) {
    const auto n = static_cast<std::int64_t>(ys.size());
    std::vector<double> sorted(ys.begin(), ys.end());
    std::sort(sorted.begin(), sorted.end());
    GlobalRanks ranks;
    ranks.r.reserve(ys.size());
    ranks.l.reserve(ys.size());
    for (double y : ys) {
        const auto below_or_eq = std::upper_bound(sorted.begin(), sorted.end(), y) - sorted.begin();
        const auto strictly_below = std::lower_bound(sorted.begin(), sorted.end(), y) - sorted.begin();
        ranks.r.push_back(below_or_eq);
        ranks.l.push_back(n - strictly_below);
    }
    return ranks;
}

/// r and l for the y values under a given x-increasing arrangement. Ties in
/// y are never randomized; they enter through the counting definitions.
inline RankProfile y_ranks_ordered(const PairedSample& sample, std::vector<std::size_t> order) {
    std::vector<double> arranged(sample.size());
    for (std::size_t i = 0; i < order.size(); ++i) arranged[i] = sample.ys[order[i]];
    GlobalRanks ranks = global_y_ranks(arranged);
    return RankProfile{std::move(order), std::move(ranks.r), std::move(ranks.l), std::nullopt};
}

/// One-stop arrangement + ranks; records the tie-break seed when x has ties.
inline RankProfile rank_profile(const PairedSample& sample, std::uint64_t seed) {
    RankProfile profile = y_ranks_ordered(sample, x_order(sample, seed));
    if (has_ties(sample.xs)) profile.seed_used = seed;
    return profile;
}

}  // namespace xicor
