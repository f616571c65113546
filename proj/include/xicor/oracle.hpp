#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "xicor/inference.hpp"
#include "xicor/xi.hpp"

// Slow reference implementations and population-level estimators. These are
// shipped, not test-only, so the CLI can cross-check the fast paths on demand.

namespace xicor::oracle {

/// xi by direct transcription of the definitions: ranks from O(n^2) set
/// counting and the literal two-branch formula. Shares x_order, so the same
/// seed produces the same arrangement as the fast path.
inline double xi_naive(const PairedSample& sample, std::uint64_t seed) {
    const std::size_t n = sample.size();
    detail::check_size(n);
    const std::vector<std::size_t> order = x_order(sample, seed);
    std::vector<double> ya(n);
    for (std::size_t i = 0; i < n; ++i) ya[i] = sample.ys[order[i]];

    const auto ni = static_cast<std::int64_t>(n);
    std::vector<std::int64_t> r(n), l(n);
    bool y_ties = false;
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t le = 0, ge = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (ya[j] <= ya[i]) ++le;
            if (ya[j] >= ya[i]) ++ge;
            if (j != i && ya[j] == ya[i]) y_ties = true;
        }
        r[i] = le;
        l[i] = ge;
    }

    std::int64_t sum_abs = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) sum_abs += std::abs(r[i + 1] - r[i]);

    if (!y_ties) return detail::one_minus_ratio(3 * sum_abs, ni * ni - 1);

    std::int64_t sum_l = 0;
    for (std::int64_t v : l) sum_l += v * (ni - v);
    if (sum_l == 0) throw ConstantInputError('y');
    return detail::one_minus_ratio(ni * sum_abs, 2 * sum_l);
}

/// tau^2 estimate transcribed literally: O(n^2) rank counting and prefix
/// sums re-accumulated per index. The combination (A n^2 - 2 B n + C^2) / D^2
/// of the four raw sums is carried out in exact integers, as in the fast
/// path, because the subtraction is catastrophically ill-conditioned when y
/// is nearly constant.
inline double tau_squared_naive(std::span<const double> ys) {
    const std::size_t n = ys.size();
    if (n < 2) throw SampleTooSmallError(n);
    const auto ni = static_cast<std::int64_t>(n);

    std::vector<std::int64_t> bigR(n), bigL(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t le = 0, ge = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (ys[j] <= ys[i]) ++le;
            if (ys[j] >= ys[i]) ++ge;
        }
        bigR[i] = le;
        bigL[i] = ge;
    }

    std::vector<std::int64_t> u(bigR);
    std::sort(u.begin(), u.end());

    __int128 a = 0, b = 0, c = 0, d = 0;
    for (std::size_t idx = 0; idx < n; ++idx) {
        const std::int64_t i = static_cast<std::int64_t>(idx) + 1;
        std::int64_t v = 0;
        for (std::size_t j = 0; j <= idx; ++j) v += u[j];
        a += static_cast<__int128>(2 * ni - 2 * i + 1) * u[idx] * u[idx];
        b += static_cast<__int128>(v + (ni - i) * u[idx]) * (v + (ni - i) * u[idx]);
        c += static_cast<__int128>(2 * ni - 2 * i + 1) * u[idx];
        d += static_cast<__int128>(bigL[idx]) * (ni - bigL[idx]);
    }
    if (d == 0) throw ConstantInputError('y');
    const __int128 numerator = a * ni * ni - 2 * b * ni + c * c;
    return static_cast<double>(static_cast<long double>(numerator) /
                               static_cast<long double>(d * d));
}

/// A seeded sampler for one (x, y) pair; the handle for population-level
/// Monte Carlo.
struct GenerativeModel {
    std::function<std::pair<double, double>(Rng&)> draw;
    std::string description;
};

inline GenerativeModel bernoulli_product_model(double p, double p_prime) {
    return GenerativeModel{
        [p, p_prime](Rng& rng) {
            const double x = rng.bernoulli(p) ? 1.0 : 0.0;
            const double z = rng.bernoulli(p_prime) ? 1.0 : 0.0;
            return std::pair{x, x * z};
        },
        "X~Bernoulli(p), Z~Bernoulli(p'), Y=XZ"};
}

inline GenerativeModel independent_uniform_model() {
    return GenerativeModel{[](Rng& rng) {
                               const double x = rng.uniform01();
                               return std::pair{x, rng.uniform01()};
                           },
                           "independent U[0,1] pair"};
}

/// Y = f(X) with X ~ U[-1,1]; noiseless functional dependence.
inline GenerativeModel functional_model(std::function<double(double)> f, std::string what) {
    return GenerativeModel{[f = std::move(f)](Rng& rng) {
                               const double x = rng.uniform(-1.0, 1.0);
                               return std::pair{x, f(x)};
                           },
                           std::move(what)};
}

struct PopulationEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
    std::size_t reps = 0;
};

/// Plug-in Monte Carlo estimate of the limit value: xi_n itself on `reps`
/// fresh samples of size n. Replicate k draws from derive_seed(seed, k).
inline PopulationEstimate xi_population_mc(const GenerativeModel& model, std::size_t n,
                                           std::size_t reps, std::uint64_t seed) {
    if (reps < 2) throw DomainError("need at least two replicates");
    std::vector<double> values(reps);
    for (std::size_t k = 0; k < reps; ++k) {
        Rng rng(derive_seed(seed, k));
        std::vector<double> xs(n), ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto [x, y] = model.draw(rng);
            xs[i] = x;
            ys[i] = y;
        }
        values[k] = xi(PairedSample(std::move(xs), std::move(ys)), rng.next()).value;
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(reps);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(reps - 1));
    return PopulationEstimate{mean, sd / std::sqrt(static_cast<double>(reps)), n, reps};
}

// ---------------------------------------------------------------------------
// Equivalence sweep: fast paths vs the naive transcriptions above, across tie
// regimes. Backs the CLI `verify` subcommand and the acceptance gate.

struct SweepConfig {
    std::size_t xi_samples = 1000;
    std::size_t tau_samples = 500;
    std::size_t max_n = 200;
    std::uint64_t seed = 0;
    // test hook: when set, replaces the fast xi so the mismatch path can be exercised
    std::function<double(const PairedSample&, std::uint64_t)> xi_override;
};

struct SweepMismatch {
    std::string what;
    std::vector<double> xs, ys;
    std::uint64_t seed = 0;
};

struct SweepReport {
    std::size_t xi_checked = 0;
    std::size_t tau_checked = 0;
    std::optional<SweepMismatch> failure;
    bool ok() const { return !failure.has_value(); }
};

namespace sweep_detail {

// Tie regimes cycled through the sweep: continuous, x-tied, y-tied, both
// tied, constant x, near-constant y.
inline std::pair<std::vector<double>, std::vector<double>> make_sample(Rng& rng, std::size_t n,
                                                                       std::size_t regime) {
    std::vector<double> xs(n), ys(n);
    const auto coarse = [&rng](std::size_t levels) {
        return static_cast<double>(rng.uniform_below(levels));
    };
    for (std::size_t i = 0; i < n; ++i) {
        switch (regime % 6) {
            case 0: xs[i] = rng.uniform01(); ys[i] = rng.uniform01(); break;
            case 1: xs[i] = coarse(4); ys[i] = rng.uniform01(); break;
            case 2: xs[i] = rng.uniform01(); ys[i] = coarse(4); break;
            case 3: xs[i] = coarse(3); ys[i] = coarse(3); break;
            case 4: xs[i] = 1.0; ys[i] = rng.uniform01(); break;
            case 5: xs[i] = rng.uniform01(); ys[i] = i == 0 ? 1.0 : 0.0; break;
        }
    }
    return {std::move(xs), std::move(ys)};
}

// Runs one evaluation that may legitimately reject constant y.
template <typename Fn>
std::optional<double> value_or_constant(Fn&& fn) {
    try {
        return fn();
    } catch (const ConstantInputError&) {
        return std::nullopt;
    }
}

}  // namespace sweep_detail

inline SweepReport run_equivalence_sweep(const SweepConfig& config) {
    SweepReport report;
    const auto fast_xi = [&](const PairedSample& s, std::uint64_t seed) {
        return config.xi_override ? config.xi_override(s, seed) : xi(s, seed).value;
    };
    const auto mismatch = [&](const char* what, std::optional<double> fast,
                              std::optional<double> naive, std::size_t n) {
        std::ostringstream msg;
        msg.precision(17);
        msg << what << ": fast=";
        fast ? (msg << *fast) : (msg << "ConstantY");
        msg << " naive=";
        naive ? (msg << *naive) : (msg << "ConstantY");
        msg << " n=" << n;
        return msg.str();
    };

    for (std::size_t k = 0; k < config.xi_samples; ++k) {
        Rng rng(derive_seed(config.seed, k));
        const std::size_t n = 2 + rng.uniform_below(config.max_n - 1);
        auto [xs, ys] = sweep_detail::make_sample(rng, n, k);
        const std::uint64_t tie_seed = rng.next();
        const PairedSample sample(xs, ys);
        const auto fast =
            sweep_detail::value_or_constant([&] { return fast_xi(sample, tie_seed); });
        const auto naive =
            sweep_detail::value_or_constant([&] { return xi_naive(sample, tie_seed); });
        ++report.xi_checked;
        if (fast != naive) {  // exact equality required, including agreeing rejections
            report.failure = SweepMismatch{mismatch("xi mismatch", fast, naive, n),
                                           std::move(xs), std::move(ys), tie_seed};
            return report;
        }
    }

    for (std::size_t k = 0; k < config.tau_samples; ++k) {
        Rng rng(derive_seed(config.seed, 1'000'000 + k));
        const std::size_t n = 2 + rng.uniform_below(config.max_n - 1);
        auto [xs, ys] = sweep_detail::make_sample(rng, n, k);
        const auto fast =
            sweep_detail::value_or_constant([&] { return tau_squared_hat(ys).value; });
        const auto naive = sweep_detail::value_or_constant([&] { return tau_squared_naive(ys); });
        ++report.tau_checked;
        bool agree = fast.has_value() == naive.has_value();
        if (agree && fast) {
            const double scale = std::max({std::abs(*fast), std::abs(*naive), 1.0});
            agree = std::abs(*fast - *naive) <= 1e-12 * scale;
        }
        if (!agree) {
            report.failure = SweepMismatch{mismatch("tau^2 mismatch", fast, naive, n),
                                           std::move(xs), std::move(ys), 0};
            return report;
        }
    }
    return report;
}

}  // namespace xicor::oracle
