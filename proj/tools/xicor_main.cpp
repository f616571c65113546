// xicor: compute the xi rank correlation, test independence, and run the
// simulation studies from the command line. Emits versioned JSON documents;
// every invocation is reproducible given its seed.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xicor/xicor.hpp"

namespace {

using nlohmann::ordered_json;

constexpr std::uint64_t kDefaultSeed = 42;  // fixed so runs reproduce by default
constexpr int kSchemaVersion = 1;

constexpr int kExitVerifyFailed = 1;
constexpr int kExitParse = 2;
constexpr int kExitConstant = 3;
constexpr int kExitTooSmall = 4;
constexpr int kExitDegenerate = 5;

struct CommonOptions {
    std::string input = "-";
    std::string output = "-";
    std::string x_column = "0";
    std::string y_column = "1";
    std::string delimiter = ",";
    std::string seed_text = std::to_string(kDefaultSeed);
    unsigned threads = 0;  // 0: XICOR_THREADS env, then hardware
    bool compact = false;
};

std::uint64_t resolve_seed(const std::string& text) {
    if (text == "random") {
        std::random_device device;
        return (static_cast<std::uint64_t>(device()) << 32) ^ device();
    }
    try {
        std::size_t used = 0;
        const std::uint64_t value = std::stoull(text, &used, 0);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw xicor::DomainError("--seed expects an unsigned integer or 'random'");
    }
}

char resolve_delimiter(const std::string& text) {
    if (text == "\\t" || text == "tab") return '\t';
    if (text.size() != 1) throw xicor::DomainError("--delimiter expects a single character");
    return text[0];
}

std::string read_input(const std::string& path) {
    std::ostringstream buffer;
    if (path == "-") {
        buffer << std::cin.rdbuf();
    } else {
        std::ifstream file(path, std::ios::binary);
        if (!file) throw xicor::DomainError("cannot open input file: " + path);
        buffer << file.rdbuf();
    }
    return buffer.str();
}

void write_output(const std::string& path, const ordered_json& doc, bool compact) {
    const std::string text = compact ? doc.dump() : doc.dump(2);
    if (path == "-") {
        std::cout << text << "\n";
    } else {
        std::ofstream file(path, std::ios::binary);
        if (!file) throw xicor::DomainError("cannot open output file: " + path);
        file << text << "\n";
    }
}

xicor::PairedSample load_sample(const CommonOptions& options) {
    xicor::CsvOptions csv;
    csv.delimiter = resolve_delimiter(options.delimiter);
    csv.x_column = options.x_column;
    csv.y_column = options.y_column;
    xicor::CsvData data = xicor::parse_paired_csv(read_input(options.input), csv);
    return xicor::PairedSample(std::move(data.xs), std::move(data.ys));
}

ordered_json json_or_null(const std::optional<std::uint64_t>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

double round_trip(double v) { return v; }  // doubles serialize shortest round-trip

// ---------------------------------------------------------------------- compute

int run_compute(const CommonOptions& options, bool symmetrize, std::size_t tie_average_draws) {
    const std::uint64_t seed = resolve_seed(options.seed_text);
    const xicor::PairedSample sample = load_sample(options);
    const xicor::XiResult result = xicor::xi(sample, seed);

    ordered_json doc;
    doc["schema"] = kSchemaVersion;
    doc["command"] = "compute";
    doc["xi"] = round_trip(result.value);
    doc["n"] = result.n;
    doc["x_had_ties"] = result.x_had_ties;
    doc["y_had_ties"] = result.y_had_ties;
    doc["seed"] = seed;
    doc["seed_used"] = json_or_null(result.seed_used);
    doc["formula"] = result.formula == xicor::XiFormula::no_tie ? "no_tie" : "general";
    if (symmetrize) doc["symmetrized"] = xicor::xi_symmetrized(sample, seed);
    if (tie_average_draws > 0) {
        const xicor::TieAverage avg = xicor::xi_tie_averaged(sample, tie_average_draws, seed);
        doc["tie_average"] = {{"draws", tie_average_draws}, {"mean", avg.mean}, {"sd", avg.sd}};
    }
    write_output(options.output, doc, options.compact);
    return 0;
}

// ------------------------------------------------------------------------- test

int run_test(const CommonOptions& options, const std::string& method, bool y_continuous,
             bool force_continuous, bool symmetrize, std::size_t n_permutations) {
    const std::uint64_t seed = resolve_seed(options.seed_text);
    const xicor::PairedSample sample = load_sample(options);

    xicor::TestResult result;
    std::string statistic_kind = "xi";
    if (method == "asymptotic") {
        if (symmetrize)
            throw xicor::DomainError(
                "the asymptotic test covers xi only; use --method permutation with --symmetrize");
        result = xicor::test_asymptotic(sample, y_continuous, seed, force_continuous);
    } else if (method == "permutation") {
        const auto statistic = symmetrize ? xicor::TestStatistic::xi_symmetrized
                                          : xicor::TestStatistic::xi;
        if (symmetrize) statistic_kind = "xi_symmetrized";
        result = xicor::test_permutation(sample, statistic, n_permutations, seed,
                                         options.threads);
    } else {
        throw xicor::DomainError("--method must be asymptotic or permutation");
    }

    ordered_json doc;
    doc["schema"] = kSchemaVersion;
    doc["command"] = "test";
    doc["statistic"] = result.statistic;
    doc["statistic_kind"] = statistic_kind;
    doc["n"] = result.n;
    doc["variance"] = result.variance;
    doc["z"] = result.z;
    doc["p_value"] = result.p_value;
    doc["method"] = xicor::to_string(result.method);
    if (result.n_permutations) doc["n_permutations"] = *result.n_permutations;
    doc["seed"] = seed;
    write_output(options.output, doc, options.compact);
    return 0;
}

// --------------------------------------------------------------------- simulate

xicor::Scenario scenario_from_name(const std::string& name) {
    using xicor::Scenario;
    for (auto kind : {Scenario::linear, Scenario::step, Scenario::w_shape, Scenario::sinusoid,
                      Scenario::circular, Scenario::heteroskedastic,
                      Scenario::independent_uniform, Scenario::independent_binomial,
                      Scenario::bernoulli_product})
        if (xicor::to_string(kind) == name) return kind;
    throw xicor::DomainError("unknown scenario: " + name);
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::stringstream stream(text);
    std::string token;
    while (std::getline(stream, token, ',')) {
        try {
            grid.push_back(std::stod(token));
        } catch (const std::exception&) {
            throw xicor::DomainError("bad grid value: " + token);
        }
    }
    if (grid.empty()) throw xicor::DomainError("empty grid");
    return grid;
}

int run_simulate(const CommonOptions& options, const std::string& study, const std::string& y_kind,
                 std::size_t n, std::size_t reps, double p, double p_prime,
                 const std::string& scenario, const std::string& lambda_text, double alpha,
                 const std::string& test_name, std::size_t n_permutations, std::size_t bins) {
    const std::uint64_t seed = resolve_seed(options.seed_text);

    ordered_json doc;
    doc["schema"] = kSchemaVersion;
    doc["command"] = "simulate";
    doc["study"] = study;

    if (study == "null") {
        xicor::NullYKind kind;
        if (y_kind == "uniform") {
            kind = xicor::NullYKind::uniform;
        } else if (y_kind == "binomial" || y_kind == "binomial_3_half") {
            kind = xicor::NullYKind::binomial_3_half;
        } else {
            throw xicor::DomainError("--y must be uniform or binomial");
        }
        const auto result =
            xicor::null_distribution_study(kind, n, reps, seed, options.threads, bins);
        doc["y"] = kind == xicor::NullYKind::uniform ? "uniform" : "binomial_3_half";
        doc["n"] = result.n;
        doc["reps"] = result.reps;
        doc["seed"] = seed;
        doc["tau_squared"] = result.tau_squared;
        doc["mean"] = result.mean;
        doc["variance"] = result.variance;
        doc["ks_distance"] = result.ks_distance;
        doc["histogram"] = {{"edges", result.bin_edges}, {"counts", result.bin_counts}};
    } else if (study == "bernoulli") {
        const auto result =
            xicor::bernoulli_dependence_study(p, p_prime, n, reps, seed, options.threads);
        doc["p"] = p;
        doc["p_prime"] = p_prime;
        doc["n"] = result.n;
        doc["reps"] = result.reps;
        doc["seed"] = seed;
        doc["population_xi"] = xicor::population_xi_bernoulli_product(p, p_prime);
        doc["mean"] = result.mean;
        doc["sd"] = result.sd;
    } else if (study == "power") {
        const auto method = [&] {
            if (test_name == "asymptotic") return xicor::TestMethod::asymptotic_continuous;
            if (test_name == "permutation") return xicor::TestMethod::permutation;
            throw xicor::DomainError("--test must be asymptotic or permutation");
        }();
        const auto curve =
            xicor::power_curve(scenario_from_name(scenario), parse_grid(lambda_text), n, reps,
                               alpha, method, seed, n_permutations, options.threads);
        doc["scenario"] = xicor::to_string(curve.kind);
        doc["lambdas"] = curve.lambdas;
        doc["rates"] = curve.rates;
        doc["std_errors"] = curve.std_errors;
        doc["alpha"] = curve.alpha;
        doc["n"] = curve.n;
        doc["reps"] = curve.reps;
        doc["test"] = xicor::to_string(curve.method);
        if (curve.method == xicor::TestMethod::permutation)
            doc["n_permutations"] = curve.n_permutations;
        doc["seed"] = seed;
    } else {
        throw xicor::DomainError("--study must be null, bernoulli, or power");
    }
    write_output(options.output, doc, options.compact);
    return 0;
}

// ------------------------------------------------------------------------ bench

int run_bench(const CommonOptions& options, const std::string& grid_text, std::size_t reps) {
    const std::uint64_t seed = resolve_seed(options.seed_text);
    std::vector<std::size_t> grid;
    for (double v : parse_grid(grid_text)) {
        if (v < 2 || v != static_cast<double>(static_cast<std::size_t>(v)))
            throw xicor::DomainError("--n-grid expects integer sizes >= 2");
        grid.push_back(static_cast<std::size_t>(v));
    }
    const auto points = xicor::runtime_benchmark(grid, reps, seed);

    ordered_json doc;
    doc["schema"] = kSchemaVersion;
    doc["command"] = "bench";
    doc["reps"] = reps;
    doc["seed"] = seed;
    doc["points"] = ordered_json::array();
    for (const auto& point : points)
        doc["points"].push_back({{"n", point.n}, {"median_seconds", point.median_seconds}});
    write_output(options.output, doc, options.compact);
    return 0;
}

// ----------------------------------------------------------------------- verify

int run_verify(const CommonOptions& options, std::size_t sweep_size, std::size_t max_n,
               bool inject_fault) {
    xicor::oracle::SweepConfig config;
    config.xi_samples = sweep_size;
    config.tau_samples = sweep_size / 2;
    config.max_n = max_n;
    config.seed = resolve_seed(options.seed_text);
    if (inject_fault)
        config.xi_override = [](const xicor::PairedSample& sample, std::uint64_t seed) {
            return xicor::xi(sample, seed).value + 1e-9;
        };
    const auto report = xicor::oracle::run_equivalence_sweep(config);

    ordered_json doc;
    doc["schema"] = kSchemaVersion;
    doc["command"] = "verify";
    doc["xi_checked"] = report.xi_checked;
    doc["tau_checked"] = report.tau_checked;
    doc["ok"] = report.ok();
    if (report.failure) {
        doc["failure"] = {{"what", report.failure->what},
                          {"seed", report.failure->seed},
                          {"xs", report.failure->xs},
                          {"ys", report.failure->ys}};
    }
    write_output(options.output, doc, options.compact);
    if (!report.ok()) {
        std::cerr << ordered_json{{"error", "verify_failed"},
                                  {"message", report.failure->what}}
                         .dump()
                  << "\n";
        return kExitVerifyFailed;
    }
    return 0;
}

void add_common(CLI::App* cmd, CommonOptions& options, bool with_input) {
    if (with_input) {
        cmd->add_option("-i,--input", options.input, "CSV/TSV path, or - for stdin");
        cmd->add_option("--x-col", options.x_column, "x column: 0-based index or header name");
        cmd->add_option("--y-col", options.y_column, "y column: 0-based index or header name");
        cmd->add_option("--delimiter", options.delimiter, "field delimiter (default ,; tab ok)");
    }
    cmd->add_option("-o,--output", options.output, "output path, or - for stdout");
    cmd->add_option("--seed", options.seed_text, "64-bit seed, or 'random'");
    cmd->add_option("--threads", options.threads,
                    "worker thread cap (overrides XICOR_THREADS; 0 = auto)");
    cmd->add_flag("--compact", options.compact, "single-line JSON output");
}

int emit_error(const char* code, const std::string& message, int exit_code) {
    std::cerr << ordered_json{{"error", code}, {"message", message}}.dump() << "\n";
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"xi rank correlation and independence testing"};
    app.require_subcommand(1);

    CommonOptions options;

    // compute
    bool symmetrize = false;
    std::size_t tie_average_draws = 0;
    auto* compute = app.add_subcommand("compute", "compute xi from two data columns");
    add_common(compute, options, true);
    compute->add_flag("--symmetrize", symmetrize, "also report max(xi(X,Y), xi(Y,X))");
    compute->add_option("--tie-average", tie_average_draws,
                        "average xi over this many tie-break draws");

    // test
    std::string method = "asymptotic";
    bool y_continuous = false;
    bool force_continuous = false;
    std::size_t n_permutations = 199;
    auto* test = app.add_subcommand("test", "test independence of the two columns");
    add_common(test, options, true);
    test->add_option("--method", method, "asymptotic or permutation");
    test->add_flag("--y-continuous", y_continuous,
                   "use the exact null variance 2/5 (continuous y only)");
    test->add_flag("--force-continuous", force_continuous,
                   "allow --y-continuous despite tied y values");
    test->add_flag("--symmetrize", symmetrize, "permutation-test max(xi(X,Y), xi(Y,X))");
    test->add_option("--n-perms", n_permutations, "permutation count (default 199)");

    // simulate
    std::string study, y_kind = "uniform", scenario = "linear", lambda_text = "0,0.25,0.5,0.75,1";
    std::string test_name = "asymptotic";
    std::size_t sim_n = 100, reps = 500, bins = 40;
    double p = 0.4, p_prime = 0.5, alpha = 0.05;
    auto* simulate = app.add_subcommand("simulate", "run a reproducible simulation study");
    add_common(simulate, options, false);
    simulate->add_option("--study", study, "null, bernoulli, or power")->required();
    simulate->add_option("--y", y_kind, "null study y law: uniform or binomial");
    simulate->add_option("--n", sim_n, "sample size per replicate");
    simulate->add_option("--reps", reps, "number of replicates");
    simulate->add_option("--p", p, "bernoulli study p");
    simulate->add_option("--pp", p_prime, "bernoulli study p'");
    simulate->add_option("--scenario", scenario, "power study scenario name");
    simulate->add_option("--lambdas", lambda_text, "comma-separated noise grid");
    simulate->add_option("--alpha", alpha, "test level");
    simulate->add_option("--test", test_name, "power study test: asymptotic or permutation");
    simulate->add_option("--n-perms", n_permutations, "permutation count");
    simulate->add_option("--bins", bins, "histogram bins for the null study");

    // bench
    std::string grid_text = "1000,10000,100000";
    std::size_t bench_reps = 11;
    auto* bench = app.add_subcommand("bench", "time xi + the asymptotic test");
    add_common(bench, options, false);
    bench->add_option("--n-grid", grid_text, "comma-separated sample sizes");
    bench->add_option("--reps", bench_reps, "repetitions per size (median reported)");

    // verify
    std::size_t sweep_size = 1000, max_n = 200;
    bool inject_fault = false;
    auto* verify = app.add_subcommand("verify", "cross-check fast paths against naive oracles");
    add_common(verify, options, false);
    verify->add_option("--sweep-size", sweep_size, "xi samples (tau gets half)");
    verify->add_option("--max-n", max_n, "largest sample size in the sweep");
    verify->add_flag("--inject-fault", inject_fault)->group("");  // testing hook

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return emit_error("invalid_arguments", e.what(), kExitParse);
    }

    try {
        if (compute->parsed()) return run_compute(options, symmetrize, tie_average_draws);
        if (test->parsed())
            return run_test(options, method, y_continuous, force_continuous, symmetrize,
                            n_permutations);
        if (simulate->parsed())
            return run_simulate(options, study, y_kind, sim_n, reps, p, p_prime, scenario,
                                lambda_text, alpha, test_name, n_permutations, bins);
        if (bench->parsed()) return run_bench(options, grid_text, bench_reps);
        if (verify->parsed()) return run_verify(options, sweep_size, max_n, inject_fault);
    } catch (const xicor::ParseError& e) {
        return emit_error("parse_error", e.what(), kExitParse);
    } catch (const xicor::ConstantInputError& e) {
        return emit_error("constant_input", e.what(), kExitConstant);
    } catch (const xicor::SampleTooSmallError& e) {
        return emit_error("sample_too_small", e.what(), kExitTooSmall);
    } catch (const xicor::VarianceDegenerateError& e) {
        return emit_error("variance_degenerate", e.what(), kExitDegenerate);
    } catch (const xicor::Error& e) {
        return emit_error("invalid_arguments", e.what(), kExitParse);
    } catch (const std::exception& e) {
        return emit_error("internal_error", e.what(), kExitParse);
    }
    return 0;
}
