#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "poscon/commands.hpp"
#include "poscon/error.hpp"
#include "poscon/reference_case.hpp"
#include "poscon/scenario.hpp"
#include "poscon/serialize.hpp"
#include "support/random_scenarios.hpp"

using namespace poscon;
namespace fs = std::filesystem;

namespace {

const fs::path scenario_dir{POSCON_SCENARIO_DIR};

struct Run {
    int code = -1;
    std::string output;
};

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("poscon_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Run cli(const std::string& args, const fs::path& dir)
{
    const auto log = dir / "log.txt";
    const std::string cmd = std::string("\"") + POSCON_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text)
{
    std::ofstream(p) << text;
}

ErrorCode parse_code(const std::string& text)
{
    try {
        parse_scenario(text, "t.yaml");
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a parse failure");
    return ErrorCode::InvalidArgument;
}

std::string parse_message(const std::string& text)
{
    try {
        parse_scenario(text, "t.yaml");
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

const std::string scalar_agent = R"(name: scalar
controller: state
mode: state
pattern:
  A0: [[0]]
  C0: [[1]]
agents:
  - label: s
    A: [[-1]]
    B: [[1]]
    C: [[1]]
    D: [[1]]
graphs:
  - nodes: 1
    edges: []
schedule:
  periodic: {order: [1], period: 10}
disturbance: {kind: zero, dim: 1}
initial:
  x: [[1]]
  w: [[1]]
)";

}  // namespace

TEST_CASE("scenario files round-trip through emit and parse")
{
    const auto ref = reference_scenario();
    CHECK(parse_scenario(emit_scenario(ref)) == ref);
    const auto two = load_scenario(scenario_dir / "two_agents.yaml");
    CHECK(parse_scenario(emit_scenario(two)) == two);
    CHECK(load_scenario(scenario_dir / "eight_agents.yaml") == ref);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        testgen::CaseOptions opt;
        opt.disturbance = testgen::DisturbanceKind::any;
        const auto rc = testgen::random_case(rng, opt);
        const auto text = emit_scenario(rc.scenario);
        CHECK(parse_scenario(text) == rc.scenario);
        CHECK(emit_scenario(parse_scenario(text)) == text);
    }
}

TEST_CASE("parse errors name the source, line and field")
{
    CHECK(parse_code("name: x\nagents: [\n") == ErrorCode::ParseError);
    const auto missing = parse_message("name: x\n");
    CHECK(missing.find("t.yaml:") != std::string::npos);
    CHECK(missing.find("pattern") != std::string::npos);

    auto text = scalar_agent;
    text.replace(text.find("A: [[-1]]"), 9, "A: [[-1, x]]");
    const auto entry = parse_message(text);
    CHECK(entry.find("t.yaml:9") != std::string::npos);
    CHECK(entry.find("agents[0].A[0][1]") != std::string::npos);

    // Shape defects are reported by validation, not by the parser.
    auto ragged = scalar_agent;
    ragged.replace(ragged.find("A: [[-1]]"), 9, "A: [[-1, 2]]");
    const auto report = run_check(parse_scenario(ragged)).validation;
    CHECK_FALSE(report.ok());

    auto bad_number = scalar_agent;
    bad_number.replace(bad_number.find("period: 10"), 10, "period: ten");
    const auto num = parse_message(bad_number);
    CHECK(num.find("t.yaml:17") != std::string::npos);
    CHECK(num.find("period") != std::string::npos);
}

TEST_CASE("check: exit codes")
{
    const auto dir = scratch("check");
    CHECK(cli("check \"" + (scenario_dir / "eight_agents.yaml").string() + "\"", dir).code == 0);

    auto bad = scalar_agent;
    bad.replace(bad.find("A0: [[0]]"), 9, "A0: [[-1]]");
    write(dir / "neg.yaml", bad);
    const auto r = cli("check \"" + (dir / "neg.yaml").string() + "\"", dir);
    CHECK(r.code == 1);
    CHECK(r.output.find("Assumption 1") != std::string::npos);
    CHECK(r.output.find("pattern.A0") != std::string::npos);

    write(dir / "broken.yaml", "name: x\nagents: [\n");
    CHECK(cli("check \"" + (dir / "broken.yaml").string() + "\"", dir).code == 2);
    CHECK(cli("check", dir).code == 2);
    CHECK(cli("frobnicate", dir).code == 2);
}

TEST_CASE("synthesize: relaxed mode reproduces the published gains")
{
    const auto dir = scratch("synth");
    const auto r = cli("synthesize \"" + (scenario_dir / "eight_agents.yaml").string() + "\" --mode relaxed --out \"" +
                           (dir / "gains.json").string() + "\"",
                       dir);
    REQUIRE(r.code == 0);
    const auto gains = read_gains(dir / "gains.json");
    const auto pub = published_values();
    REQUIRE(gains.agents.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(max_abs(gains.agents[i].K1 - pub[i].K1) <= 1e-3);
        CHECK(max_abs(gains.agents[i].K2 - pub[i].K2) <= 1e-3);
        REQUIRE(gains.agents[i].K3);
        CHECK(max_abs(*gains.agents[i].K3 - pub[i].K3) <= 1e-3);
    }
}

TEST_CASE("synthesize: full output conditions at gamma 4 fail on the pinned certificate")
{
    const auto dir = scratch("synth_full");
    const auto r = cli("synthesize \"" + (scenario_dir / "eight_agents.yaml").string() +
                           "\" --mode output --gamma 4 --out \"" + (dir / "gains.json").string() + "\"",
                       dir);
    CHECK(r.code == 1);
    CHECK(r.output.find("diagonal entry (1,1) = 2.0625") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "gains.json"));
}

TEST_CASE("synthesize: a single stable scalar agent is feasible")
{
    const auto dir = scratch("scalar");
    write(dir / "s.yaml", scalar_agent);
    const auto r = cli("synthesize \"" + (dir / "s.yaml").string() + "\" --gamma-bisect --out \"" +
                           (dir / "g.json").string() + "\"",
                       dir);
    CHECK(r.code == 0);
    const auto g = read_gains(dir / "g.json");
    REQUIRE(g.agents.size() == 1);
    CHECK(g.agents[0].K1(0, 0) < 0.0);
    const auto s = parse_scenario(scalar_agent);
    const auto res = run_synthesis(s, {});
    REQUIRE(res.gains);
    CHECK(res.diagnostics.empty());
    CHECK(mu_lower_bound(s.pattern, s.graphs) == 1.0);
    CHECK(res.gains->mu == 1.0 + s.mu_margin);
    const auto sim = run_simulation(s, *res.gains, {});
    CHECK(sim.report.positivity.pass);
    CHECK_FALSE(sim.report.generator_bound);
    CHECK(sim.pass());
}

TEST_CASE("simulate: short horizon, determinism and artifacts")
{
    const auto dir = scratch("sim");
    const auto cfg = (scenario_dir / "two_agents.yaml").string();
    REQUIRE(cli("synthesize \"" + cfg + "\" --out \"" + (dir / "g.json").string() + "\"", dir).code == 0);
    const auto gains = "--gains \"" + (dir / "g.json").string() + "\"";

    const auto a = cli("simulate \"" + cfg + "\" " + gains + " --out \"" + (dir / "a").string() + "\"", dir);
    const auto b = cli("simulate \"" + cfg + "\" " + gains + " --out \"" + (dir / "b").string() + "\"", dir);
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    const auto csv = slurp(dir / "a" / "trace.csv");
    CHECK(csv == slurp(dir / "b" / "trace.csv"));
    CHECK(slurp(dir / "a" / "audit.json") == slurp(dir / "b" / "audit.json"));
    CHECK(csv.rfind("t,x1_1,x1_2,x2_1,x2_2,x2_3,y1,y2,y0,e1,e2,E2_1,E2_2,D2\n", 0) == 0);

    const auto quick = cli("simulate \"" + cfg + "\" " + gains + " --horizon 0.1 --out \"" + (dir / "q").string() + "\"",
                           dir);
    const auto audit = nlohmann::json::parse(slurp(dir / "q" / "audit.json"));
    CHECK(audit["audit"]["consensus"]["status"] == "insufficient_decay");
    CHECK(quick.code == 1);

    CHECK(cli("simulate \"" + cfg + "\" --gains \"" + (dir / "missing.json").string() + "\"", dir).code == 2);
}

TEST_CASE("reproduce-paper: default and optional flags")
{
    const auto dir = scratch("repro");
    const auto r = cli("reproduce-paper --out \"" + (dir / "out").string() + "\"", dir);
    REQUIRE(r.code == 0);
    for (const auto* f : {"scenario.yaml", "gains.json", "summary.md", "nominal/trace.csv", "nominal/audit.json",
                          "disturbed/trace.csv", "disturbed/audit.json"}) {
        CHECK(fs::exists(dir / "out" / f));
    }
    CHECK(load_scenario(dir / "out" / "scenario.yaml") == reference_scenario());

    const auto flags = cli("reproduce-paper --gamma-bisect --state-feedback --horizon 50 --out \"" +
                               (dir / "sf").string() + "\"",
                           dir);
    CHECK(flags.code == 0);
    const auto g = read_gains(dir / "sf" / "gains.json");
    CHECK(g.controller == ControllerKind::state_feedback);
    CHECK(slurp(dir / "sf" / "summary.md").find("gamma") != std::string::npos);
}
