#include <catch2/catch_amalgamated.hpp>

#include <string>

#include <json.hpp>

#include "../support/test_support.hpp"

using json = nlohmann::json;
using test_support::fixture;
using test_support::golden;
using test_support::run_cli;
using test_support::slurp;

TEST_CASE("compute on the identity fixture matches its golden output") {
    const auto result = run_cli("compute -i " + fixture("identity20.csv"));
    REQUIRE(result.exit_code == 0);
    REQUIRE(result.out == slurp(golden("compute_identity20.json")));

    const json doc = json::parse(result.out);
    REQUIRE(doc["schema"] == 1);
    REQUIRE(doc["n"] == 20);
    REQUIRE(doc["xi"] == 18.0 / 21.0);
    REQUIRE(doc["formula"] == "no_tie");
    REQUIRE(doc["x_had_ties"] == false);
    REQUIRE(doc["seed_used"].is_null());
}

TEST_CASE("compute with symmetrize and tie averaging on tied x data") {
    const auto result = run_cli("compute --symmetrize --tie-average 64 -i " +
                                fixture("tied_x.csv"));
    REQUIRE(result.exit_code == 0);
    REQUIRE(result.out == slurp(golden("compute_tied_x.json")));

    const json doc = json::parse(result.out);
    REQUIRE(doc["x_had_ties"] == true);
    REQUIRE_FALSE(doc["seed_used"].is_null());
    REQUIRE(doc.contains("symmetrized"));
    REQUIRE(doc["tie_average"]["draws"] == 64);
    REQUIRE(doc["tie_average"]["sd"].get<double>() >= 0.0);
}

TEST_CASE("asymptotic test on a continuous fixture matches its golden output") {
    const auto result =
        run_cli("test --y-continuous -i " + fixture("independent100.csv"));
    REQUIRE(result.exit_code == 0);
    REQUIRE(result.out == slurp(golden("test_asymptotic_independent.json")));

    const json doc = json::parse(result.out);
    REQUIRE(doc["method"] == "asymptotic_continuous");
    REQUIRE(doc["variance"] == 0.4);
    const double p = doc["p_value"].get<double>();
    REQUIRE(p >= 0.0);
    REQUIRE(p <= 1.0);
}

TEST_CASE("permutation test on the noiseless sinusoid hits the add-one floor") {
    const auto result = run_cli("test --method permutation --n-perms 199 -i " +
                                fixture("sinusoid100.csv"));
    REQUIRE(result.exit_code == 0);
    const json doc = json::parse(result.out);
    REQUIRE(doc["p_value"] == 0.005);
    REQUIRE(doc["n_permutations"] == 199);
}

TEST_CASE("output is byte-identical across runs and thread settings") {
    const std::string null_args = "simulate --study null --y uniform --n 20 --reps 200";
    const auto a = run_cli(null_args, "XICOR_THREADS=1");
    const auto b = run_cli(null_args, "XICOR_THREADS=2");
    const auto c = run_cli(null_args);
    REQUIRE(a.exit_code == 0);
    REQUIRE(a.out == b.out);
    REQUIRE(a.out == c.out);

    const std::string power_args =
        "simulate --study power --scenario sinusoid --lambdas 0,0.5 --n 50 --reps 100";
    const auto d = run_cli(power_args, "XICOR_THREADS=1");
    const auto e = run_cli(power_args, "XICOR_THREADS=2");
    REQUIRE(d.exit_code == 0);
    REQUIRE(d.out == e.out);

    const std::string perm_args =
        "test --method permutation --n-perms 99 -i " + fixture("independent100.csv");
    const auto f = run_cli(perm_args, "XICOR_THREADS=1");
    const auto g = run_cli(perm_args, "XICOR_THREADS=2");
    REQUIRE(f.out == g.out);

    // the flag wins over the environment and never changes values
    const auto h = run_cli(perm_args + " --threads 2", "XICOR_THREADS=1");
    REQUIRE(h.out == f.out);
}

TEST_CASE("simulate goldens reproduce byte-for-byte") {
    const auto null_run = run_cli("simulate --study null --y uniform --n 20 --reps 200 --bins 10");
    REQUIRE(null_run.exit_code == 0);
    REQUIRE(null_run.out == slurp(golden("simulate_null_small.json")));

    const auto bernoulli =
        run_cli("simulate --study bernoulli --p 0.4 --pp 0.5 --n 200 --reps 200");
    REQUIRE(bernoulli.exit_code == 0);
    REQUIRE(bernoulli.out == slurp(golden("simulate_bernoulli_small.json")));
    REQUIRE(json::parse(bernoulli.out)["population_xi"] == 0.375);

    const auto power = run_cli(
        "simulate --study power --scenario sinusoid --lambdas 0,0.5,1 --n 50 --reps 50");
    REQUIRE(power.exit_code == 0);
    REQUIRE(power.out == slurp(golden("simulate_power_small.json")));
}

TEST_CASE("error exits carry machine-readable JSON on stderr") {
    const auto constant = run_cli("compute -i " + fixture("constant_y.csv"));
    REQUIRE(constant.exit_code == 3);
    REQUIRE(json::parse(constant.err)["error"] == "constant_input");

    const auto tiny = run_cli("compute -i " + fixture("tiny.csv"));
    REQUIRE(tiny.exit_code == 4);
    REQUIRE(json::parse(tiny.err)["error"] == "sample_too_small");

    const auto bad = run_cli("compute -i " + fixture("bad.csv"));
    REQUIRE(bad.exit_code == 2);
    REQUIRE(json::parse(bad.err)["error"] == "parse_error");

    const auto unknown = run_cli("compute --definitely-not-a-flag");
    REQUIRE(unknown.exit_code == 2);
    REQUIRE(json::parse(unknown.err)["error"] == "invalid_arguments");

    const auto bad_seed = run_cli("compute --seed banana -i " + fixture("identity20.csv"));
    REQUIRE(bad_seed.exit_code == 2);
}

TEST_CASE("continuous declaration on tied y is refused unless forced") {
    const auto refused = run_cli("test --y-continuous -i " + fixture("tied_x.csv"));
    REQUIRE(refused.exit_code == 2);
    const auto forced =
        run_cli("test --y-continuous --force-continuous -i " + fixture("tied_x.csv"));
    REQUIRE(forced.exit_code == 0);

    const auto sym_asym = run_cli("test --symmetrize -i " + fixture("independent100.csv"));
    REQUIRE(sym_asym.exit_code == 2);
    const auto sym_perm = run_cli("test --method permutation --symmetrize --n-perms 49 -i " +
                                  fixture("independent100.csv"));
    REQUIRE(sym_perm.exit_code == 0);
    REQUIRE(json::parse(sym_perm.out)["statistic_kind"] == "xi_symmetrized");
}

TEST_CASE("verify passes clean and fails with an injected fault") {
    const auto ok = run_cli("verify --sweep-size 200 --max-n 80");
    REQUIRE(ok.exit_code == 0);
    const json doc = json::parse(ok.out);
    REQUIRE(doc["ok"] == true);
    REQUIRE(doc["xi_checked"] == 200);
    REQUIRE(doc["tau_checked"] == 100);

    const auto large = run_cli("verify --sweep-size 5000");  // budget: comfortably under 60 s
    REQUIRE(large.exit_code == 0);
    REQUIRE(json::parse(large.out)["ok"] == true);

    const auto broken = run_cli("verify --sweep-size 200 --max-n 80 --inject-fault");
    REQUIRE(broken.exit_code == 1);
    const json failed = json::parse(broken.out);
    REQUIRE(failed["ok"] == false);
    REQUIRE(failed["failure"].contains("xs"));
    REQUIRE(json::parse(broken.err)["error"] == "verify_failed");
}

TEST_CASE("reads stdin and honors output options") {
    const auto piped = run_cli("compute", "printf '1,1\\n2,2\\n3,3\\n' |");
    REQUIRE(piped.exit_code == 0);
    REQUIRE(json::parse(piped.out)["n"] == 3);

    const auto two_rows = run_cli("compute", "printf '1,1\\n2,2\\n' |");
    REQUIRE(two_rows.exit_code == 0);
    REQUIRE(json::parse(two_rows.out)["xi"] == 0.0);

    const auto compact = run_cli("compute --compact -i " + fixture("identity20.csv"));
    REQUIRE(compact.exit_code == 0);
    REQUIRE(compact.out.find('\n') == compact.out.size() - 1);

    const std::string out_path = "/tmp/xicor_cli_out.json";
    const auto to_file =
        run_cli("compute -o " + out_path + " -i " + fixture("identity20.csv"));
    REQUIRE(to_file.exit_code == 0);
    REQUIRE(json::parse(slurp(out_path))["n"] == 20);
    std::remove(out_path.c_str());
}

TEST_CASE("random seed mode still produces valid output") {
    const auto result = run_cli("compute --seed random -i " + fixture("identity20.csv"));
    REQUIRE(result.exit_code == 0);
    REQUIRE(json::parse(result.out)["xi"] == 18.0 / 21.0);
}

TEST_CASE("bench runs and reports one point per grid entry") {
    const auto result = run_cli("bench --n-grid 500,1000 --reps 3");
    REQUIRE(result.exit_code == 0);
    const json doc = json::parse(result.out);
    REQUIRE(doc["points"].size() == 2);
    REQUIRE(doc["points"][0]["n"] == 500);
    REQUIRE(doc["points"][0]["median_seconds"].get<double>() > 0.0);
}

TEST_CASE("tsv input via the delimiter flag") {
    const auto result = run_cli("compute --delimiter tab", "printf 'x\\ty\\n1\\t1\\n2\\t2\\n' |");
    REQUIRE(result.exit_code == 0);
    REQUIRE(json::parse(result.out)["n"] == 2);
}
