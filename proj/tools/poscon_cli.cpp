#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "poscon/commands.hpp"
#include "poscon/error.hpp"

namespace {

std::optional<poscon::GainMode> parse_mode(const std::string& s)
{
    if (s.empty()) {
        return std::nullopt;
    }
    if (s == "state") {
        return poscon::GainMode::state_feedback;
    }
    if (s == "output") {
        return poscon::GainMode::output_feedback;
    }
    return poscon::GainMode::relaxed;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Robust positive consensus toolkit"};
    app.require_subcommand(1);

    std::string config;
    std::string mode;
    std::string out;
    std::string gains_file;
    std::optional<double> gamma;
    std::optional<double> horizon;
    std::optional<double> step;
    std::optional<std::uint64_t> seed;
    bool bisect = false;
    bool state_feedback = false;

    auto* check = app.add_subcommand("check", "validate a scenario and solve the regulator equations");
    check->add_option("config", config, "scenario file")->required();

    auto* synth = app.add_subcommand("synthesize", "search certificates and write a gain file");
    synth->add_option("config", config, "scenario file")->required();
    synth->add_option("--mode", mode, "condition set")->check(CLI::IsMember({"state", "output", "relaxed"}));
    synth->add_option("--gamma", gamma, "attenuation level")->check(CLI::PositiveNumber);
    synth->add_flag("--gamma-bisect", bisect, "also report the minimal feasible gamma per agent");
    synth->add_option("--out", out, "gain file")->default_val("gains.json");

    auto* sim = app.add_subcommand("simulate", "integrate the closed loop and audit it");
    sim->add_option("config", config, "scenario file")->required();
    sim->add_option("--gains", gains_file, "gain file from synthesize")->required();
    sim->add_option("--out", out, "output directory")->default_val("run");
    sim->add_option("--horizon", horizon, "final time")->check(CLI::PositiveNumber);
    sim->add_option("--step", step, "integration step")->check(CLI::PositiveNumber);
    sim->add_option("--seed", seed, "seed for uniform initial conditions");

    auto* repro = app.add_subcommand("reproduce-paper", "run the built-in eight-agent reference case");
    repro->add_option("--out", out, "output directory")->default_val("reference");
    repro->add_flag("--gamma-bisect", bisect, "also report the minimal feasible gamma per agent");
    repro->add_flag("--state-feedback", state_feedback, "use state feedback instead of the observer");
    repro->add_option("--horizon", horizon, "final time")->check(CLI::PositiveNumber);
    repro->add_option("--step", step, "integration step")->check(CLI::PositiveNumber);
    repro->add_option("--seed", seed, "seed for uniform initial conditions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : poscon::exit_parse;
    }

    try {
        poscon::SimulateOptions sim_opts;
        sim_opts.horizon = horizon;
        sim_opts.step = step;
        sim_opts.seed = seed;
        if (*check) {
            return poscon::cmd_check(poscon::load_scenario(config), std::cout);
        }
        if (*synth) {
            poscon::SynthesizeOptions so;
            so.mode = parse_mode(mode);
            so.gamma = gamma;
            so.gamma_bisect = bisect;
            return poscon::cmd_synthesize(poscon::load_scenario(config), so, out, std::cout);
        }
        if (*sim) {
            return poscon::cmd_simulate(poscon::load_scenario(config), gains_file, out, sim_opts, std::cout);
        }
        poscon::ReproduceOptions ro;
        ro.gamma_bisect = bisect;
        ro.state_feedback = state_feedback;
        ro.simulate = sim_opts;
        return poscon::cmd_reproduce_paper(out, ro, std::cout);
    } catch (const poscon::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return poscon::exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return poscon::exit_failure;
    }
}
