#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "seqtest/json_io.hpp"
#include "test_util.hpp"

using namespace seqtest;
using namespace seqtest::testutil;

namespace {

#ifndef SEQTEST_CLI_PATH
#error "SEQTEST_CLI_PATH must point at the CLI binary"
#endif

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(SEQTEST_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    char buf[4096];
    while (size_t got = fread(buf, 1, sizeof buf, pipe)) result.output.append(buf, got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string temp_path(const std::string& name) {
    return std::string("/tmp/seqtest_cli_") + name;
}

std::string write_spec(const TestSpec& spec, const std::string& name) {
    const std::string path = temp_path(name);
    write_text_file(path, spec_to_json(spec).dump());
    return path;
}

}  // namespace

TEST_CASE("validate: good spec exits 0, trivial spec exits 3 and names the reason") {
    const std::string good = write_spec(bernoulli3({6.0, 6.0, 6.0}, 50), "good.json");
    const RunResult ok = run_cli("validate --config " + good);
    CHECK(ok.exit_code == 0);

    json trivial = spec_to_json(bernoulli2());
    trivial["lambdas"] = std::vector<double>{0.0, 0.5, 0.6, 0.0};
    const std::string bad = temp_path("trivial.json");
    write_text_file(bad, trivial.dump());
    const RunResult rejected = run_cli("validate --config " + bad);
    CHECK(rejected.exit_code == 3);
    CHECK(rejected.output.find("non-triviality") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli("evaluate --config /tmp/whatever --rule bogus").exit_code == 2);
    const std::string good = write_spec(bernoulli3({6.0, 6.0, 6.0}, 50), "good.json");
    CHECK(run_cli("scenario run not_a_scenario").exit_code == 3);
}

TEST_CASE("evaluate writes identical machine output for any thread count") {
    const std::string spec = write_spec(bernoulli3({9.0, 9.0, 9.0}, 120), "threads.json");
    const std::string out1 = temp_path("t1.json");
    const std::string out2 = temp_path("t2.json");
    CHECK(run_cli("evaluate --config " + spec + " --threads 1 --out " + out1).exit_code == 0);
    CHECK(run_cli("evaluate --config " + spec + " --threads 2 --out " + out2).exit_code == 0);
    CHECK(read_text_file(out1) == read_text_file(out2));
    CHECK(read_text_file(out1).find("weighted_ess") != std::string::npos);
}

TEST_CASE("simulate is reproducible and respects the seed") {
    const std::string spec = write_spec(bernoulli3({9.0, 9.0, 9.0}, 200), "sim.json");
    const std::string base =
        "simulate --config " + spec + " --reps 5000 --true-theta 0.4 --seed 11 --out ";
    const std::string o1 = temp_path("sim1.json"), o2 = temp_path("sim2.json"),
                      o3 = temp_path("sim3.json");
    CHECK(run_cli(base + o1 + " --threads 1").exit_code == 0);
    CHECK(run_cli(base + o2 + " --threads 2").exit_code == 0);
    CHECK(read_text_file(o1) == read_text_file(o2));
    CHECK(run_cli("simulate --config " + spec +
                  " --reps 5000 --true-theta 0.4 --seed 12 --out " + o3)
              .exit_code == 0);
    CHECK(read_text_file(o1) != read_text_file(o3));

    const TestReport report = report_from_json(json::parse(read_text_file(o1)));
    CHECK(report.monte_carlo);
    CHECK(report.reps == 5000);
}

TEST_CASE("report round-trips through the CLI json output") {
    const std::string spec = write_spec(bernoulli3({7.0, 8.0, 9.0}, 100), "round.json");
    const std::string out = temp_path("round_out.json");
    CHECK(run_cli("evaluate --config " + spec + " --stop-dist --out " + out).exit_code == 0);
    const json parsed = json::parse(read_text_file(out));
    const TestReport a = report_from_json(parsed);
    CHECK(report_to_json(a) == parsed);
    CHECK(parsed.at("schema") == 1);
}

TEST_CASE("csv output format") {
    const std::string spec = write_spec(bernoulli2(5.0, 4.0, 0.5, 80), "csv.json");
    const std::string out = temp_path("report.csv");
    CHECK(run_cli("evaluate --config " + spec + " --format csv --out " + out).exit_code == 0);
    const std::string csv = read_text_file(out);
    CHECK(csv.rfind("kind,param,accept,estimate,se", 0) == 0);
}

TEST_CASE("optimal command reports the minimal lagrangian") {
    const std::string spec = write_spec(bernoulli2(5.0, 4.0, 0.5, 60), "opt.json");
    const std::string pol = temp_path("opt_policy.json");
    const RunResult r = run_cli("optimal --config " + spec + " --policy-out " + pol);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("minimal Lagrangian") != std::string::npos);
    // The stored policy parses back.
    const json parsed = json::parse(read_text_file(pol));
    CHECK(parsed.at("horizon") == 60);
}

TEST_CASE("twosided command wraps a three-hypothesis design") {
    const TestSpec spec(Model::bernoulli(), {0.2, 0.5, 0.8}, {0.2, 0.5, 0.8},
                        {0.25, 0.5, 0.25}, row_lambdas({15.0, 15.0, 15.0}),
                        Horizon::finite(300));
    const std::string path = write_spec(spec, "twosided.json");
    const RunResult r = run_cli("twosided --config " + path + " --grid 0.5:0.6:0.05");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("alpha'") != std::string::npos);
    CHECK(r.output.find("0.55") != std::string::npos);
}
