#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "av2/json_io.hpp"

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void spit(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    f << body;
}

RunResult run(const std::string& args, const std::string& env = "") {
    const std::string out_path = "/tmp/av2_cli_test_out";
    const std::string cmd = env + " " + std::string(AV2_CLI_PATH) + " " + args + " > " + out_path +
                            " 2> /tmp/av2_cli_test_err";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_path);
    return r;
}

const char* kThreePoint = "data/portraits/three_point_eta1.json";

}  // namespace

TEST_CASE("solve: exponential fixed point through the CLI") {
    const RunResult r = run(std::string("solve ") + kThreePoint);
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(std::abs(j["alpha"][0].get<double>() - 1.0) < 1e-12);
    CHECK(std::abs(j["alpha"][1].get<double>()) < 1e-12);
    CHECK(std::abs(j["beta"][0].get<double>()) < 1e-12);
    CHECK(std::abs(j["beta"][1].get<double>() - 6.283185307179586) < 1e-10);
}

TEST_CASE("solve: exit codes for degenerate and iteration-capped runs") {
    CHECK(run("solve data/portraits/obstructed_collider.json").exit_code == 2);
    CHECK(run("solve data/portraits/four_point_fixed.json --max-iter 3").exit_code == 3);
}

TEST_CASE("solve: malformed input reports violations with exit 1") {
    spit("/tmp/av2_bad1.json", "{ not json");
    CHECK(run("solve /tmp/av2_bad1.json").exit_code == 1);

    // unknown fields are rejected
    spit("/tmp/av2_bad2.json", R"({"labels":["0","1","inf"],"successor":{"0":"1","1":"1"},
        "branch_index":{"1":1},"zero":"0","one":"1","inf":"inf","lambda":"inf",
        "preperiod":0,"period":1,"mystery":3})");
    CHECK(run("solve /tmp/av2_bad2.json").exit_code == 1);

    // a structurally invalid portrait: periodic asymptotic value
    spit("/tmp/av2_bad3.json", R"({"labels":["0","1","inf"],"successor":{"0":"1","1":"0"},
        "branch_index":{"1":1},"zero":"0","one":"1","inf":"inf","lambda":"inf",
        "preperiod":0,"period":2})");
    CHECK(run("solve /tmp/av2_bad3.json").exit_code == 1);

    // type errors: non-string label, non-integer branch index
    spit("/tmp/av2_bad4.json", R"({"labels":["0","1",3],"successor":{"0":"1","1":"1"},
        "branch_index":{"1":1},"zero":"0","one":"1","inf":"inf","lambda":"inf",
        "preperiod":0,"period":1})");
    CHECK(run("solve /tmp/av2_bad4.json").exit_code == 1);
    spit("/tmp/av2_bad5.json", R"({"labels":["0","1","inf"],"successor":{"0":"1","1":"1"},
        "branch_index":{"1":1.5},"zero":"0","one":"1","inf":"inf","lambda":"inf",
        "preperiod":0,"period":1})");
    CHECK(run("solve /tmp/av2_bad5.json").exit_code == 1);
}

TEST_CASE("solve: traces are written and byte-stable across runs") {
    const std::string flags = std::string("solve data/portraits/four_point_fixed.json") +
                              " --trace-out /tmp/av2_trace_a";
    REQUIRE(run(flags).exit_code == 0);
    const std::string csv_a = slurp("/tmp/av2_trace_a.csv");
    const std::string jsonl_a = slurp("/tmp/av2_trace_a.jsonl");
    CHECK(csv_a.rfind("n,alpha_re,alpha_im,beta_re,beta_im,eta,eta_residual,min_sep,max_disp,"
                      "systole_upper\n", 0) == 0);
    CHECK(!jsonl_a.empty());

    REQUIRE(run(std::string("solve data/portraits/four_point_fixed.json") +
                " --trace-out /tmp/av2_trace_b")
                .exit_code == 0);
    CHECK(csv_a == slurp("/tmp/av2_trace_b.csv"));
    CHECK(jsonl_a == slurp("/tmp/av2_trace_b.jsonl"));
}

TEST_CASE("orbit subcommand") {
    const RunResult r =
        run(R"(orbit '{"alpha":[1,0],"beta":[0,6.283185307179586]}' --start 0 --n 20)");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["status"] == "preperiodic");
    CHECK(j["preperiod"] == 1);
    CHECK(j["period"] == 1);

    // 2^z from 0 runs 0, 1, 2, 4, 16, ... past the escape radius
    const RunResult esc =
        run(R"(orbit '{"alpha":[1,0],"beta":[0.6931471805599453,0]}' --start 0 --n 40)");
    REQUIRE(esc.exit_code == 0);
    const auto je = nlohmann::json::parse(esc.out);
    CHECK(je["status"] == "escaped");
    CHECK(je["points"][2][0].get<double>() == doctest::Approx(2.0));
    CHECK(je["points"][4][0].get<double>() == doctest::Approx(16.0));

    // a pole preimage lands on infinity in one step (tangent-type member)
    const RunResult pole = run(
        R"(orbit '{"alpha":[1.4142135623730951,0],"beta":[1,0]}' --start 0,3.141592653589793 --n 5)");
    REQUIRE(pole.exit_code == 0);
    const auto jp = nlohmann::json::parse(pole.out);
    CHECK(jp["status"] == "terminated_at_infinity");
    CHECK(jp["points"].size() == 2);

    CHECK(run(R"(orbit '{"alpha":[1,0]}' --start 0)").exit_code == 1);
    CHECK(run(R"(orbit '{"alpha":[1,0],"beta":[0,6.28]}' --start notanumber)").exit_code == 1);
}

TEST_CASE("check subcommand is seed-reproducible and rejects bad params") {
    const std::string args = R"(check '{"alpha":[1,0],"beta":[0,6.283185307179586]}' --samples 60 --seed 7)";
    const RunResult a = run(args);
    REQUIRE(a.exit_code == 0);
    CHECK(nlohmann::json::parse(a.out)["pass"] == true);
    const RunResult b = run(args);
    CHECK(a.out == b.out);

    CHECK(run(R"(check '{"alpha":[1,0],"beta":[0,0]}')").exit_code == 1);
}

TEST_CASE("transfer subcommand reports a contracting ratio") {
    REQUIRE(run("solve data/portraits/four_point_fixed.json --trace-out /tmp/av2_tr").exit_code == 0);
    // assemble the transfer input from the solved trace
    const std::string jsonl = slurp("/tmp/av2_tr.jsonl");
    const auto last = jsonl.rfind('\n', jsonl.size() - 2);
    const auto cfg = nlohmann::json::parse(jsonl.substr(last + 1));
    const auto params = nlohmann::json::parse(run("solve data/portraits/four_point_fixed.json").out);
    nlohmann::json in{{"params", {{"alpha", params["alpha"]}, {"beta", params["beta"]}}},
                      {"positions", cfg["positions"]}};
    spit("/tmp/av2_transfer_in.json", in.dump());

    const RunResult r = run("transfer /tmp/av2_transfer_in.json");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    REQUIRE(j["ratios"].size() == 1);
    CHECK(j["ratios"][0]["ratio"].get<double>() < 1.0);
    CHECK(j["ratios"][0]["ratio"].get<double>() > 0.0);

    // colliding marked positions are rejected
    nlohmann::json broken = in;
    broken["positions"]["c2"] = broken["positions"]["1"];
    spit("/tmp/av2_transfer_bad.json", broken.dump());
    CHECK(run("transfer /tmp/av2_transfer_bad.json").exit_code == 1);
}

TEST_CASE("render subcommand writes deterministic PPM output") {
    spit("/tmp/av2_render_spec.json",
         R"({"alpha":[1,0],"center":[0,3.0],"width":6.0,"height":6.0,
             "resolution":[32,24],"max_iter":64})");
    REQUIRE(run("render /tmp/av2_render_spec.json /tmp/av2_a.ppm --threads 1").exit_code == 0);
    REQUIRE(run("render /tmp/av2_render_spec.json /tmp/av2_b.ppm --threads 4").exit_code == 0);
    REQUIRE(run("render /tmp/av2_render_spec.json /tmp/av2_c.ppm --threads 4", "AV2_THREADS=2")
                .exit_code == 0);
    const std::string a = slurp("/tmp/av2_a.ppm");
    CHECK(a.rfind("P6\n32 24\n255\n", 0) == 0);
    CHECK(a.size() == 13 + 32 * 24 * 3);
    CHECK(a == slurp("/tmp/av2_b.ppm"));
    CHECK(a == slurp("/tmp/av2_c.ppm"));

    CHECK(run("render /tmp/av2_render_spec.json /nonexistent_dir/x.ppm").exit_code == 1);
}

TEST_CASE("solve accepts an explicit initial configuration file") {
    spit("/tmp/av2_init.json", R"({"positions":{"0":[0,0],"1":[1,0],"c2":[0.5,1.5],"inf":"inf"}})");
    const RunResult r = run("solve data/portraits/four_point_fixed.json --init /tmp/av2_init.json");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(std::abs(j["beta"][0].get<double>() - -1.4612043209299792) < 1e-9);

    // a configuration violating the pinned points is rejected
    spit("/tmp/av2_init_bad.json", R"({"positions":{"0":[0.2,0],"1":[1,0],"c2":[0.5,1.5],"inf":"inf"}})");
    CHECK(run("solve data/portraits/four_point_fixed.json --init /tmp/av2_init_bad.json").exit_code == 1);
}

TEST_CASE("portrait and configuration JSON round trips") {
    const auto j = nlohmann::json::parse(slurp("data/portraits/five_point_lambda_merge.json"));
    const av2::OrbitPortrait p = av2::portrait_from_json(j);
    const av2::OrbitPortrait q = av2::portrait_from_json(av2::portrait_to_json(p));
    CHECK(q.labels == p.labels);
    CHECK(q.successor == p.successor);
    CHECK(q.branch_index == p.branch_index);
    CHECK(q.lambda == p.lambda);
    CHECK(q.preperiod == p.preperiod);
    CHECK(q.period == p.period);

    av2::MarkedConfiguration c = av2::auto_configuration(p);
    const av2::MarkedConfiguration c2 = av2::config_from_json(av2::config_to_json(c));
    for (const auto& [label, pos] : c.positions) CHECK(c2.at(label) == pos);

    const av2::QuadDiff qd({av2::cx(0.0), av2::cx(1.0), av2::cx(-1.0)}, {av2::cx(0.5, -0.25)});
    const av2::QuadDiff qd2 = av2::quaddiff_from_json(av2::quaddiff_to_json(qd));
    CHECK(qd2.poles == qd.poles);
    CHECK(qd2.numerator == qd.numerator);
}

TEST_CASE("solve with a random seeded initialization") {
    const RunResult a = run("solve data/portraits/four_point_fixed.json --init random --seed 3");
    REQUIRE(a.exit_code == 0);
    const RunResult b = run("solve data/portraits/four_point_fixed.json --init random --seed 3");
    CHECK(a.out == b.out);
    const auto j = nlohmann::json::parse(a.out);
    CHECK(std::abs(j["beta"][0].get<double>() - -1.4612043209299792) < 1e-7);
}
