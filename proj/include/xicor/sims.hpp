#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "xicor/inference.hpp"
#include "xicor/parallel.hpp"
#include "xicor/xi.hpp"

// Reproducible simulation studies: null-distribution summaries, the
// dependent-Bernoulli convergence experiment, power curves over the six
// synthetic alternatives, and wall-time benchmarks. Replicates are
// independent sub-streams, so parallel and serial runs emit identical
// results.

namespace xicor {

enum class Scenario {
    linear,
    step,
    w_shape,
    sinusoid,
    circular,
    heteroskedastic,
    independent_uniform,
    independent_binomial,
    bernoulli_product,
    custom,
};

struct ScenarioSpec {
    Scenario kind = Scenario::linear;
    double lambda = 0.0;  // noise level in [0,1]; ignored by the independence kinds
    std::size_t n = 100;
    double p = 0.4;        // bernoulli_product only
    double p_prime = 0.5;  // bernoulli_product only
};

inline constexpr double kScenarioPi = 3.141592653589793238462643383279502884;

/// Draws n pairs per the scenario formulas. Functional scenarios take
/// X ~ U[-1,1] and eps ~ N(0,1); the draw order per pair is x, then the
/// sign z where present, then eps.
inline PairedSample generate(const ScenarioSpec& spec, std::uint64_t seed) {
    if (!(spec.lambda >= 0.0 && spec.lambda <= 1.0))
        throw DomainError("lambda must lie in [0,1]");
    if (spec.n < 2) throw SampleTooSmallError(spec.n);
    if (spec.kind == Scenario::custom)
        throw DomainError("custom scenarios are sampled through oracle::GenerativeModel");

    Rng rng(seed);
    const double lam = spec.lambda;
    std::vector<double> xs(spec.n), ys(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        double x = 0.0, y = 0.0;
        switch (spec.kind) {
            case Scenario::linear:
                x = rng.uniform(-1.0, 1.0);
                y = 0.5 * x + 3.0 * lam * rng.normal();
                break;
            case Scenario::step: {
                x = rng.uniform(-1.0, 1.0);
                const double f = x < -0.5 ? -3.0 : x < 0.0 ? 2.0 : x < 0.5 ? -4.0 : -3.0;
                y = f + 10.0 * lam * rng.normal();
                break;
            }
            case Scenario::w_shape:
                x = rng.uniform(-1.0, 1.0);
                y = (x < 0.0 ? std::abs(x + 0.5) : std::abs(x - 0.5)) + 0.75 * lam * rng.normal();
                break;
            case Scenario::sinusoid:
                x = rng.uniform(-1.0, 1.0);
                y = std::cos(8.0 * kScenarioPi * x) + 3.0 * lam * rng.normal();
                break;
            case Scenario::circular: {
                x = rng.uniform(-1.0, 1.0);
                const double z = rng.bernoulli(0.5) ? 1.0 : -1.0;
                y = z * std::sqrt(1.0 - x * x) + 0.9 * lam * rng.normal();
                break;
            }
            case Scenario::heteroskedastic: {
                x = rng.uniform(-1.0, 1.0);
                const double sigma = std::abs(x) <= 0.5 ? 1.0 : 0.0;
                y = 3.0 * (sigma * (1.0 - lam) + lam) * rng.normal();
                break;
            }
            case Scenario::independent_uniform:
                x = rng.uniform01();
                y = rng.uniform01();
                break;
            case Scenario::independent_binomial:
                x = static_cast<double>(rng.binomial(3, 0.5));
                y = static_cast<double>(rng.binomial(3, 0.5));
                break;
            case Scenario::bernoulli_product: {
                x = rng.bernoulli(spec.p) ? 1.0 : 0.0;
                const double z = rng.bernoulli(spec.p_prime) ? 1.0 : 0.0;
                y = x * z;
                break;
            }
            case Scenario::custom: break;  // unreachable
        }
        xs[i] = x;
        ys[i] = y;
    }
    return PairedSample(std::move(xs), std::move(ys));
}

enum class NullYKind { uniform, binomial_3_half };

struct NullStudyResult {
    NullYKind y_kind = NullYKind::uniform;
    std::size_t n = 0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    double tau_squared = 0.0;   // 2/5 for uniform; estimated for binomial
    double mean = 0.0;          // of sqrt(n) xi_n
    double variance = 0.0;      // of sqrt(n) xi_n
    double ks_distance = 0.0;   // to N(0, tau_squared)
    std::vector<double> bin_edges;
    std::vector<std::uint64_t> bin_counts;
};

namespace detail {

inline double ks_distance_to_normal(std::vector<double> values, double variance) {
    std::sort(values.begin(), values.end());
    const double sd = std::sqrt(variance);
    const double count = static_cast<double>(values.size());
    double dist = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double cdf = normal_cdf(values[i] / sd);
        dist = std::max(dist, (static_cast<double>(i) + 1.0) / count - cdf);
        dist = std::max(dist, cdf - static_cast<double>(i) / count);
    }
    return dist;
}

inline void fill_histogram(const std::vector<double>& values, std::size_t bins,
                           std::vector<double>& edges, std::vector<std::uint64_t>& counts) {
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double width = std::max(*hi_it - lo, 1e-300);
    edges.resize(bins + 1);
    for (std::size_t j = 0; j <= bins; ++j)
        edges[j] = lo + width * static_cast<double>(j) / static_cast<double>(bins);
    counts.assign(bins, 0);
    for (double v : values) {
        auto idx = static_cast<std::size_t>((v - lo) / width * static_cast<double>(bins));
        ++counts[std::min(idx, bins - 1)];
    }
}

inline double mean_of(const std::vector<double>& values) {
    double m = 0.0;
    for (double v : values) m += v;
    return m / static_cast<double>(values.size());
}

inline double sample_variance(const std::vector<double>& values, double mean) {
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(values.size() - 1);
}

}  // namespace detail

/// Distribution of sqrt(n) xi_n under independence. For binomial y the
/// variance for the reference normal is estimated once from a calibration
/// sample of 10^6 draws (stream 0); replicate k uses stream k+1, drawing the
/// data first and the tie-break seed second.
inline NullStudyResult null_distribution_study(NullYKind y_kind, std::size_t n, std::size_t reps,
                                               std::uint64_t seed, unsigned threads = 0,
                                               std::size_t bins = 40) {
    if (reps < 100) throw DomainError("need at least 100 replicates");
    ScenarioSpec spec;
    spec.kind = y_kind == NullYKind::uniform ? Scenario::independent_uniform
                                             : Scenario::independent_binomial;
    spec.n = n;

    NullStudyResult out;
    out.y_kind = y_kind;
    out.n = n;
    out.reps = reps;
    out.seed = seed;
    if (y_kind == NullYKind::uniform) {
        out.tau_squared = 0.4;
    } else {
        constexpr std::size_t kCalibrationSize = 1'000'000;
        Rng calib(derive_seed(seed, 0));
        std::vector<double> draws(kCalibrationSize);
        for (double& d : draws) d = static_cast<double>(calib.binomial(3, 0.5));
        out.tau_squared = tau_squared_hat(draws).value;
    }

    std::vector<double> values(reps);
    const double root_n = std::sqrt(static_cast<double>(n));
    parallel_for(reps, threads, [&](std::size_t k) {
        const std::uint64_t rep_seed = derive_seed(seed, k + 1);
        const PairedSample data = generate(spec, derive_seed(rep_seed, 0));
        values[k] = root_n * xi(data, derive_seed(rep_seed, 1)).value;
    });

    out.mean = detail::mean_of(values);
    out.variance = detail::sample_variance(values, out.mean);
    out.ks_distance = detail::ks_distance_to_normal(values, out.tau_squared);
    detail::fill_histogram(values, bins, out.bin_edges, out.bin_counts);
    return out;
}

struct DependenceMoments {
    double mean = 0.0;
    double sd = 0.0;
    std::size_t n = 0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
};

/// Convergence experiment for the dependent-Bernoulli model Y = XZ: moments
/// of xi_n across replicates.
inline DependenceMoments bernoulli_dependence_study(double p, double p_prime, std::size_t n,
                                                    std::size_t reps, std::uint64_t seed,
                                                    unsigned threads = 0) {
    if (reps < 2) throw DomainError("need at least two replicates");
    if (!(p > 0.0 && p < 1.0) || !(p_prime > 0.0 && p_prime < 1.0))
        throw DomainError("p and p' must lie strictly inside (0,1)");
    ScenarioSpec spec;
    spec.kind = Scenario::bernoulli_product;
    spec.n = n;
    spec.p = p;
    spec.p_prime = p_prime;

    std::vector<double> values(reps);
    parallel_for(reps, threads, [&](std::size_t k) {
        const std::uint64_t rep_seed = derive_seed(seed, k);
        const PairedSample data = generate(spec, derive_seed(rep_seed, 0));
        values[k] = xi(data, derive_seed(rep_seed, 1)).value;
    });
    const double mean = detail::mean_of(values);
    return DependenceMoments{mean, std::sqrt(detail::sample_variance(values, mean)), n, reps,
                             seed};
}

struct PowerCurve {
    Scenario kind = Scenario::linear;
    std::vector<double> lambdas;
    std::vector<double> rates;       // rejection fraction per lambda
    std::vector<double> std_errors;  // binomial standard errors
    double alpha = 0.05;
    std::size_t n = 0;
    std::size_t reps = 0;
    TestMethod method = TestMethod::asymptotic_continuous;
    std::size_t n_permutations = 0;  // meaningful for the permutation method
    std::uint64_t seed = 0;
};

/// Rejection rate of the chosen test along a noise grid. The asymptotic
/// variant runs the continuous-y test unconditionally (at lambda = 0 the
/// step and heteroskedastic scenarios produce tied y values; the variance
/// is forced to 2/5 there, matching the protocol the curves reproduce).
inline PowerCurve power_curve(Scenario kind, std::vector<double> lambdas, std::size_t n,
                              std::size_t reps, double alpha, TestMethod method,
                              std::uint64_t seed, std::size_t n_permutations = 199,
                              unsigned threads = 0) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
    if (reps < 1) throw DomainError("need at least one replicate");
    if (method != TestMethod::asymptotic_continuous && method != TestMethod::permutation)
        throw DomainError("power curves support the continuous asymptotic or permutation test");
    for (std::size_t j = 0; j + 1 < lambdas.size(); ++j)
        if (!(lambdas[j] < lambdas[j + 1])) throw DomainError("lambda grid must be increasing");

    PowerCurve curve;
    curve.kind = kind;
    curve.lambdas = std::move(lambdas);
    curve.alpha = alpha;
    curve.n = n;
    curve.reps = reps;
    curve.method = method;
    curve.n_permutations = method == TestMethod::permutation ? n_permutations : 0;
    curve.seed = seed;

    for (std::size_t j = 0; j < curve.lambdas.size(); ++j) {
        ScenarioSpec spec;
        spec.kind = kind;
        spec.lambda = curve.lambdas[j];
        spec.n = n;
        const std::uint64_t grid_seed = derive_seed(seed, j);

        std::vector<unsigned char> rejected(reps, 0);
        parallel_for(reps, threads, [&](std::size_t k) {
            const std::uint64_t rep_seed = derive_seed(grid_seed, k);
            const PairedSample data = generate(spec, derive_seed(rep_seed, 0));
            const std::uint64_t test_seed = derive_seed(rep_seed, 1);
            const double p_value =
                method == TestMethod::permutation
                    ? test_permutation(data, TestStatistic::xi, n_permutations, test_seed, 1)
                          .p_value
                    : test_asymptotic(data, true, test_seed, /*force_continuous=*/true).p_value;
            rejected[k] = p_value <= alpha ? 1 : 0;
        });

        std::size_t hits = 0;
        for (unsigned char r : rejected) hits += r;
        const double rate = static_cast<double>(hits) / static_cast<double>(reps);
        curve.rates.push_back(rate);
        curve.std_errors.push_back(std::sqrt(rate * (1.0 - rate) / static_cast<double>(reps)));
    }
    return curve;
}

struct BenchPoint {
    std::size_t n = 0;
    double median_seconds = 0.0;
};

/// Median wall time of xi + the continuous asymptotic test on independent
/// uniform data. Data generation happens outside the timed region.
inline std::vector<BenchPoint> runtime_benchmark(const std::vector<std::size_t>& n_grid,
                                                 std::size_t reps, std::uint64_t seed) {
    if (reps < 1) throw DomainError("need at least one repetition");
    std::vector<BenchPoint> points;
    points.reserve(n_grid.size());
    double sink = 0.0;
    for (std::size_t g = 0; g < n_grid.size(); ++g) {
        const std::size_t n = n_grid[g];
        std::vector<double> times(reps);
        for (std::size_t k = 0; k < reps; ++k) {
            const std::uint64_t rep_seed = derive_seed(seed, g * reps + k);
            ScenarioSpec spec;
            spec.kind = Scenario::independent_uniform;
            spec.n = n;
            const PairedSample data = generate(spec, derive_seed(rep_seed, 0));
            const auto start = std::chrono::steady_clock::now();
            sink += xi(data, derive_seed(rep_seed, 1)).value;
            sink += test_asymptotic(data, true, derive_seed(rep_seed, 2)).p_value;
            const auto stop = std::chrono::steady_clock::now();
            times[k] = std::chrono::duration<double>(stop - start).count();
        }
        std::sort(times.begin(), times.end());
        points.push_back(BenchPoint{n, times[reps / 2]});
    }
    if (!std::isfinite(sink)) throw Error("benchmark sink corrupted");  // keeps the work alive
    return points;
}

inline std::string to_string(Scenario kind) {
    switch (kind) {
        case Scenario::linear: return "linear";
        case Scenario::step: return "step";
        case Scenario::w_shape: return "w_shape";
        case Scenario::sinusoid: return "sinusoid";
        case Scenario::circular: return "circular";
        case Scenario::heteroskedastic: return "heteroskedastic";
        case Scenario::independent_uniform: return "independent_uniform";
        case Scenario::independent_binomial: return "independent_binomial";
        case Scenario::bernoulli_product: return "bernoulli_product";
        case Scenario::custom: return "custom";
    }
    return "unknown";
}

inline std::string to_string(TestMethod method) {
    switch (method) {
        case TestMethod::asymptotic_continuous: return "asymptotic_continuous";
        case TestMethod::asymptotic_general: return "asymptotic_general";
        case TestMethod::permutation: return "permutation";
    }
    return "unknown";
}

}  // namespace xicor
