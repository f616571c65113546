#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <vector>

#include "xicor/sims.hpp"

using namespace xicor;

TEST_CASE("noiseless scenarios satisfy their defining identities") {
    ScenarioSpec spec;
    spec.n = 500;
    spec.lambda = 0.0;

    spec.kind = Scenario::linear;
    const PairedSample linear = generate(spec, 1);
    for (std::size_t i = 0; i < linear.size(); ++i)
        REQUIRE(linear.ys[i] == 0.5 * linear.xs[i]);

    spec.kind = Scenario::sinusoid;
    const PairedSample sinusoid = generate(spec, 2);
    for (std::size_t i = 0; i < sinusoid.size(); ++i)
        REQUIRE(sinusoid.ys[i] == std::cos(8.0 * kScenarioPi * sinusoid.xs[i]));

    spec.kind = Scenario::circular;
    const PairedSample circular = generate(spec, 3);
    for (std::size_t i = 0; i < circular.size(); ++i) {
        const double radius = circular.xs[i] * circular.xs[i] + circular.ys[i] * circular.ys[i];
        REQUIRE(std::abs(radius - 1.0) < 1e-12);
    }

    spec.kind = Scenario::w_shape;
    const PairedSample w = generate(spec, 4);
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double x = w.xs[i];
        REQUIRE(w.ys[i] == (x < 0.0 ? std::abs(x + 0.5) : std::abs(x - 0.5)));
    }
}

TEST_CASE("step function takes the four stated plateau values") {
    ScenarioSpec spec;
    spec.kind = Scenario::step;
    spec.n = 2000;
    spec.lambda = 0.0;
    const PairedSample data = generate(spec, 5);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double x = data.xs[i];
        const double expected = x < -0.5 ? -3.0 : x < 0.0 ? 2.0 : x < 0.5 ? -4.0 : -3.0;
        REQUIRE(data.ys[i] == expected);
    }
}

TEST_CASE("heteroskedastic scenario at lambda=1 is pure noise") {
    ScenarioSpec spec;
    spec.kind = Scenario::heteroskedastic;
    spec.n = 300;
    spec.lambda = 1.0;
    const PairedSample data = generate(spec, 6);
    // replay the documented draw order: x, then eps
    Rng rng(6);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double x = rng.uniform(-1.0, 1.0);
        const double eps = rng.normal();
        REQUIRE(data.xs[i] == x);
        REQUIRE(data.ys[i] == 3.0 * eps);
    }
}

TEST_CASE("discrete scenarios produce their supports") {
    ScenarioSpec spec;
    spec.kind = Scenario::bernoulli_product;
    spec.n = 500;
    const PairedSample bernoulli = generate(spec, 7);
    for (std::size_t i = 0; i < bernoulli.size(); ++i) {
        REQUIRE((bernoulli.xs[i] == 0.0 || bernoulli.xs[i] == 1.0));
        REQUIRE((bernoulli.ys[i] == 0.0 || bernoulli.ys[i] == 1.0));
        REQUIRE(bernoulli.ys[i] <= bernoulli.xs[i]);  // y = xz
    }

    spec.kind = Scenario::independent_binomial;
    const PairedSample binomial = generate(spec, 8);
    for (std::size_t i = 0; i < binomial.size(); ++i) {
        REQUIRE(binomial.xs[i] >= 0.0);
        REQUIRE(binomial.xs[i] <= 3.0);
        REQUIRE(binomial.xs[i] == std::floor(binomial.xs[i]));
    }
}

TEST_CASE("generate is deterministic and validates its spec") {
    ScenarioSpec spec;
    spec.kind = Scenario::linear;
    spec.lambda = 0.3;
    spec.n = 100;
    const PairedSample a = generate(spec, 9);
    const PairedSample b = generate(spec, 9);
    REQUIRE(a.xs == b.xs);
    REQUIRE(a.ys == b.ys);

    spec.lambda = 1.5;
    REQUIRE_THROWS_AS(generate(spec, 0), DomainError);
    spec.lambda = 0.0;
    spec.kind = Scenario::custom;
    REQUIRE_THROWS_AS(generate(spec, 0), DomainError);
    spec.kind = Scenario::linear;
    spec.n = 1;
    REQUIRE_THROWS_AS(generate(spec, 0), SampleTooSmallError);
}

TEST_CASE("null study, uniform y at n=20 matches the asymptotic law") {
    const NullStudyResult study =
        null_distribution_study(NullYKind::uniform, 20, 10000, 70);
    REQUIRE(study.tau_squared == 0.4);
    REQUIRE(std::abs(study.mean) < 0.03);
    REQUIRE(study.ks_distance < 0.05);
    REQUIRE(std::accumulate(study.bin_counts.begin(), study.bin_counts.end(), std::uint64_t{0}) ==
            study.reps);
    for (std::size_t j = 0; j + 1 < study.bin_edges.size(); ++j)
        REQUIRE(study.bin_edges[j] < study.bin_edges[j + 1]);
}

TEST_CASE("null study, binomial y at n=1000 matches N(0, tau^2)") {
    const NullStudyResult study =
        null_distribution_study(NullYKind::binomial_3_half, 1000, 10000, 71);
    // tau^2 for Binomial(3,1/2) is about 0.55, well away from the continuous 0.4
    REQUIRE(study.tau_squared > 0.53);
    REQUIRE(study.tau_squared < 0.57);
    REQUIRE(study.ks_distance < 0.03);
}

TEST_CASE("null study is thread-count invariant") {
    const NullStudyResult a = null_distribution_study(NullYKind::uniform, 50, 400, 72, 1);
    const NullStudyResult b = null_distribution_study(NullYKind::uniform, 50, 400, 72, 2);
    REQUIRE(a.mean == b.mean);
    REQUIRE(a.variance == b.variance);
    REQUIRE(a.ks_distance == b.ks_distance);
    REQUIRE(a.bin_counts == b.bin_counts);
}

TEST_CASE("bernoulli dependence study hits the known moments") {
    const DependenceMoments moments = bernoulli_dependence_study(0.4, 0.5, 1000, 1000, 73);
    REQUIRE(moments.mean > 0.364);
    REQUIRE(moments.mean < 0.384);
    REQUIRE(moments.sd > 0.032);
    REQUIRE(moments.sd < 0.048);
}

TEST_CASE("bernoulli study with tiny p' sits near zero dependence") {
    // population xi = 0.05 * 0.6 / (1 - 0.02) ~ 0.031
    const DependenceMoments moments = bernoulli_dependence_study(0.4, 0.05, 1000, 200, 81);
    REQUIRE(moments.mean < 0.08);
    REQUIRE(moments.mean > -0.02);
}

TEST_CASE("permutation test is calibrated on the discrete null too") {
    // independent Binomial(3,1/2) pairs: tau^2 is far from 2/5, but the
    // permutation test needs no variance and must hold its size.
    const PowerCurve curve = power_curve(Scenario::independent_binomial, {0.0}, 100, 500, 0.05,
                                         TestMethod::permutation, 82, 199);
    REQUIRE(curve.rates[0] > 0.03);
    REQUIRE(curve.rates[0] < 0.08);
}

TEST_CASE("power curve: noiseless sinusoid always rejects") {
    const PowerCurve curve = power_curve(Scenario::sinusoid, {0.0}, 100, 200, 0.05,
                                         TestMethod::asymptotic_continuous, 74);
    REQUIRE(curve.rates.size() == 1);
    REQUIRE(curve.rates[0] == 1.0);
}

TEST_CASE("power curve: heteroskedastic lambda=1 is an independence point") {
    const PowerCurve curve = power_curve(Scenario::heteroskedastic, {1.0}, 100, 500, 0.05,
                                         TestMethod::asymptotic_continuous, 75);
    REQUIRE(curve.rates[0] > 0.03);
    REQUIRE(curve.rates[0] < 0.08);
}

TEST_CASE("xi keeps more power on the w shape than on noised linear data") {
    const PowerCurve w = power_curve(Scenario::w_shape, {0.5}, 100, 300, 0.05,
                                     TestMethod::asymptotic_continuous, 76);
    const PowerCurve linear = power_curve(Scenario::linear, {0.5}, 100, 300, 0.05,
                                          TestMethod::asymptotic_continuous, 76);
    REQUIRE(w.rates[0] > linear.rates[0] + 0.1);
}

TEST_CASE("mean xi declines as scenario noise grows") {
    for (Scenario kind : {Scenario::linear, Scenario::sinusoid}) {
        double previous = 2.0;
        for (double lambda : {0.0, 0.5, 1.0}) {
            ScenarioSpec spec;
            spec.kind = kind;
            spec.lambda = lambda;
            spec.n = 100;
            double mean = 0.0;
            const std::size_t reps = 300;
            for (std::size_t k = 0; k < reps; ++k) {
                const std::uint64_t rep_seed = derive_seed(77 + static_cast<int>(kind), k);
                const PairedSample data = generate(spec, derive_seed(rep_seed, 0));
                mean += xi(data, derive_seed(rep_seed, 1)).value;
            }
            mean /= static_cast<double>(reps);
            REQUIRE(mean < previous);
            previous = mean;
        }
    }
}

TEST_CASE("power curve validates its inputs and is thread invariant") {
    REQUIRE_THROWS_AS(power_curve(Scenario::linear, {0.5, 0.2}, 50, 10, 0.05,
                                  TestMethod::asymptotic_continuous, 0),
                      DomainError);
    REQUIRE_THROWS_AS(power_curve(Scenario::linear, {0.0}, 50, 10, 1.5,
                                  TestMethod::asymptotic_continuous, 0),
                      DomainError);
    REQUIRE_THROWS_AS(power_curve(Scenario::linear, {0.0}, 50, 10, 0.05,
                                  TestMethod::asymptotic_general, 0),
                      DomainError);

    const PowerCurve a = power_curve(Scenario::linear, {0.0, 0.4}, 60, 200, 0.05,
                                     TestMethod::asymptotic_continuous, 78, 199, 1);
    const PowerCurve b = power_curve(Scenario::linear, {0.0, 0.4}, 60, 200, 0.05,
                                     TestMethod::asymptotic_continuous, 78, 199, 2);
    REQUIRE(a.rates == b.rates);
    REQUIRE(a.std_errors == b.std_errors);
}

TEST_CASE("permutation-based power curve works at the independence point") {
    const PowerCurve curve = power_curve(Scenario::independent_uniform, {0.0}, 60, 200, 0.05,
                                         TestMethod::permutation, 79, 99);
    REQUIRE(curve.rates[0] > 0.01);
    REQUIRE(curve.rates[0] < 0.10);
    REQUIRE(curve.n_permutations == 99);
}

TEST_CASE("runtime benchmark reports plausible medians") {
    const auto points = runtime_benchmark({500, 2000}, 5, 80);
    REQUIRE(points.size() == 2);
    REQUIRE(points[0].n == 500);
    REQUIRE(points[1].n == 2000);
    for (const auto& point : points) {
        REQUIRE(point.median_seconds > 0.0);
        REQUIRE(point.median_seconds < 1.0);
    }
}
