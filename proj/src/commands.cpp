#include "poscon/commands.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "poscon/error.hpp"
#include "poscon/reference_case.hpp"
#include "poscon/regulator.hpp"

namespace poscon {
namespace {

std::string num(double v)
{
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

std::string fixed(double v, int digits = 4)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    auto text = os.str();
    // Drop the sign of values that round to zero.
    if (text.front() == '-' && text.find_first_not_of("-0.") == std::string::npos) {
        text.erase(0, 1);
    }
    return text;
}

std::string sci(double v)
{
    std::ostringstream os;
    os << std::scientific << std::setprecision(3) << v;
    return os.str();
}

std::string row_text(const Mat& m)
{
    std::ostringstream os;
    os << '[';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        if (r > 0) {
            os << "; ";
        }
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            os << (c > 0 ? " " : "") << fixed(m(r, c));
        }
    }
    os << ']';
    return os.str();
}

std::string margins_text(const std::vector<NamedMargin>& margins)
{
    std::string s;
    for (const auto& m : margins) {
        if (!s.empty()) {
            s += ", ";
        }
        s += m.name + "=" + sci(m.value) + (m.pass ? "" : " FAIL");
    }
    return s;
}

ControllerKind controller_for(GainMode mode, ControllerKind fallback)
{
    switch (mode) {
    case GainMode::state_feedback: return ControllerKind::state_feedback;
    case GainMode::output_feedback: return ControllerKind::output_feedback;
    case GainMode::relaxed: break;
    }
    return fallback;
}

// Human-readable reason a pinned certificate fails, naming the offending
// diagonal entry when the definiteness test is violated.
std::string pinned_failure(const AgentModel& agent, const PinnedCertificate& pin,
                           const std::optional<Vec>& p, double delta, std::optional<double> gamma,
                           const ToleranceConfig& tol)
{
    const auto describe = [](const std::string& block, const ConditionMargins& m) {
        std::string s;
        if (!m.entrywise.pass) {
            s += block + " entrywise condition fails (min entry " + sci(m.entrywise.min_entry) + "); ";
        }
        if (!m.definiteness.pass) {
            const auto k = std::to_string(m.definiteness.max_diagonal_index + 1);
            s += block + " definiteness fails (margin " + sci(m.definiteness.margin) +
                 ", diagonal entry (" + k + "," + k + ") = " + fixed(m.definiteness.max_diagonal) +
                 (m.definiteness.max_diagonal > 0 ? " > 0" : "") + "); ";
        }
        return s;
    };
    std::string why;
    if (p) {
        const auto om = check_output_conditions(agent, *p, pin.q, delta, gamma, tol);
        why = describe("P", om.observer) + describe("Q", om.tracking);
    } else if (gamma) {
        why = describe("Q", check_state_conditions(agent, pin.q, delta, *gamma, tol));
    } else {
        why = describe("Q", check_relaxed_conditions(agent, pin.q, delta, tol));
    }
    if (why.size() >= 2) {
        why.resize(why.size() - 2);
    }
    return why;
}

void ensure_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::InvalidArgument, dir.string() + ": " + ec.message());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::InvalidArgument, path.string() + ": cannot write");
    }
    out << text;
}

void write_simulation(const SimulationResult& result, const std::filesystem::path& dir)
{
    ensure_dir(dir);
    {
        std::ofstream csv(dir / "trace.csv");
        if (!csv) {
            throw Error(ErrorCode::InvalidArgument, (dir / "trace.csv").string() + ": cannot write");
        }
        write_trace_csv(result.trajectory, csv);
    }
    write_text(dir / "audit.json", simulation_to_json(result).dump(2) + "\n");
}

void print_audit(const SimulationResult& r, std::ostream& out)
{
    const auto& rep = r.report;
    out << "positivity: " << (rep.positivity.pass ? "pass" : "FAIL")
        << " (min " << sci(rep.positivity.positivity_min) << ")\n";
    if (r.consensus_requested) {
        double worst = 0.0;
        for (double v : rep.consensus.tail_sup) {
            worst = std::max(worst, v);
        }
        out << "consensus: " << (r.consensus_pass ? "pass" : "FAIL") << " (max tail sup "
            << sci(worst) << ", fit " << to_string(rep.consensus.status);
        if (rep.consensus.decay_rate) {
            out << ", rate " << fixed(*rep.consensus.decay_rate);
        }
        out << ")\n";
    }
    if (rep.l2) {
        double worst = rep.l2->slack.empty() ? 0.0 : rep.l2->slack.front();
        for (double v : rep.l2->slack) {
            worst = std::min(worst, v);
        }
        out << "l2 gain: " << (rep.l2->pass ? "pass" : "FAIL") << " (gamma " << num(r.gamma)
            << ", min slack " << sci(worst) << ")\n";
    }
    if (rep.generator_bound) {
        out << "generator bound: " << (rep.generator_bound->pass ? "pass" : "FAIL")
            << (r.bound_requested ? "" : " (informational)") << " (margin "
            << sci(rep.generator_bound->margin) << ")\n";
    }
}

}  // namespace

int exit_code_for(const Error& e)
{
    switch (e.code()) {
    case ErrorCode::ParseError: return exit_parse;
    case ErrorCode::NonFiniteState: return exit_divergence;
    default: return exit_failure;
    }
}

// ---- check -----------------------------------------------------------------

bool CheckResult::pass() const
{
    return validation.ok() &&
           std::all_of(regulator_errors.begin(), regulator_errors.end(),
                       [](const std::string& s) { return s.empty(); });
}

CheckResult run_check(const Scenario& scenario)
{
    CheckResult r;
    r.validation = validate_scenario(scenario.agents, scenario.pattern, scenario.graphs,
                                     scenario.tolerances);
    for (const auto& agent : scenario.agents) {
        try {
            auto sol = solve_regulator(agent, scenario.pattern, scenario.tolerances);
            std::string err;
            if (!sol.positive_certified) {
                err = "regulator solution has negative entries";
            }
            r.regulators.emplace_back(std::move(sol));
            r.regulator_errors.push_back(err);
        } catch (const Error& e) {
            r.regulators.emplace_back();
            r.regulator_errors.emplace_back(e.what());
        }
    }
    return r;
}

int cmd_check(const Scenario& scenario, std::ostream& out)
{
    const auto r = run_check(scenario);
    out << "scenario " << scenario.name << ": " << scenario.agents.size() << " agents, "
        << scenario.graphs.size() << " graphs\n";
    for (const auto& issue : r.validation.issues) {
        out << "  FAIL " << issue.location << ": " << issue.message << '\n';
    }
    out << "agent  regulator  residual    X                                  U\n";
    for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
        out << std::left << std::setw(7) << scenario.agents[i].label;
        if (r.regulator_errors[i].empty()) {
            const auto& s = *r.regulators[i];
            out << std::setw(11) << "pass" << std::setw(12) << sci(s.residual) << std::setw(35)
                << row_text(s.X) << row_text(s.U) << '\n';
        } else {
            out << "FAIL       " << r.regulator_errors[i] << '\n';
        }
    }
    out << (r.pass() ? "check: pass\n" : "check: FAIL\n");
    return r.pass() ? exit_ok : exit_failure;
}

// ---- synthesize ------------------------------------------------------------

SynthesisResult run_synthesis(const Scenario& scenario, const SynthesizeOptions& options)
{
    SynthesisResult r;
    const auto& tol = scenario.tolerances;
    const GainMode mode = options.mode.value_or(scenario.mode);
    const ControllerKind controller = controller_for(mode, scenario.controller);
    const bool output = controller == ControllerKind::output_feedback;
    const ConditionSet conditions =
        mode == GainMode::relaxed ? ConditionSet::relaxed : ConditionSet::full;
    const double gamma = options.gamma.value_or(scenario.gamma);
    const std::optional<double> used_gamma =
        conditions == ConditionSet::full ? std::optional<double>(gamma) : std::nullopt;

    GainSet set;
    set.controller = controller;
    set.lambda_min = scenario.agents.size() > 1 ? min_lambda2(scenario.graphs) : 0.0;
    set.mu = scenario.resolve_mu();
    if (!validate_mu(set.mu, scenario.pattern, scenario.graphs, tol)) {
        r.warnings.push_back("mu = " + num(set.mu) + " is below the coupling bound " +
                             num(mu_lower_bound(scenario.pattern, scenario.graphs, tol)));
    }

    for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
        const auto& agent = scenario.agents[i];
        const std::string who = "agent " + agent.label + ": ";
        try {
            const auto regulator = solve_regulator(agent, scenario.pattern, tol);
            FeasibilityCertificate cert;
            const auto& pin = i < scenario.pinned.size() ? scenario.pinned[i] : std::nullopt;
            if (pin) {
                if (output && !pin->p) {
                    throw Error(ErrorCode::MissingCertificate, "pinned certificate lacks P");
                }
                const std::optional<Vec> p = output ? pin->p : std::nullopt;
                const double delta = pin->delta.value_or(minimal_delta(agent, pin->q, p));
                cert = certify(agent, pin->q, p, delta, used_gamma, tol);
                if (!cert.pass()) {
                    r.diagnostics.push_back(who + "Infeasible at the pinned certificate" +
                                            (used_gamma ? " (gamma = " + num(gamma) + ")" : "") +
                                            ": " + pinned_failure(agent, *pin, p, delta, used_gamma, tol));
                    continue;
                }
            } else {
                SearchOptions so;
                so.controller = controller;
                so.conditions = conditions;
                so.gamma = gamma;
                cert = search_certificate(agent, so, tol);
            }
            auto g = compute_gains(agent, cert, regulator, controller, tol);
            if (mode == GainMode::relaxed) {
                g.mode = GainMode::relaxed;
            }
            set.agents.push_back(std::move(g));
        } catch (const InfeasibleError& e) {
            r.diagnostics.push_back(who + e.what() + " [best: " + margins_text(e.best_margins()) + "]");
        } catch (const Error& e) {
            r.diagnostics.push_back(who + e.what());
        }
    }

    if (options.gamma_bisect) {
        for (const auto& agent : scenario.agents) {
            r.minimal_gamma.push_back(bisect_gamma(agent, controller, options.bisect_low,
                                                   options.bisect_high, options.bisect_resolution, tol));
        }
    }
    if (r.diagnostics.empty()) {
        r.gains = std::move(set);
    }
    return r;
}

int cmd_synthesize(const Scenario& scenario, const SynthesizeOptions& options,
                   const std::filesystem::path& out_file, std::ostream& out)
{
    const auto r = run_synthesis(scenario, options);
    for (const auto& w : r.warnings) {
        out << "warning: " << w << '\n';
    }
    for (const auto& d : r.diagnostics) {
        out << "FAIL " << d << '\n';
    }
    for (std::size_t i = 0; i < r.minimal_gamma.size(); ++i) {
        out << "agent " << scenario.agents[i].label << ": minimal gamma "
            << (r.minimal_gamma[i] ? fixed(*r.minimal_gamma[i]) : std::string("not found")) << '\n';
    }
    if (!r.gains) {
        out << "synthesize: FAIL\n";
        return exit_failure;
    }
    std::vector<std::string> labels;
    for (const auto& a : scenario.agents) {
        labels.push_back(a.label);
    }
    for (std::size_t i = 0; i < r.gains->agents.size(); ++i) {
        const auto& g = r.gains->agents[i];
        out << "agent " << labels[i] << " [" << to_string(g.certificate.conditions) << "] K1="
            << row_text(g.K1) << " K2=" << row_text(g.K2);
        if (g.K3) {
            out << " K3=" << row_text(g.K3->transpose()) << "^T";
        }
        out << '\n';
    }
    if (out_file.has_parent_path()) {
        ensure_dir(out_file.parent_path());
    }
    write_gains(out_file, *r.gains, labels, r.minimal_gamma);
    out << "mu = " << num(r.gains->mu) << ", lambda_min = " << num(r.gains->lambda_min) << '\n';
    out << "wrote " << out_file.string() << '\n';
    return exit_ok;
}

// ---- simulate --------------------------------------------------------------

bool SimulationResult::pass() const
{
    bool ok = report.positivity.pass;
    if (consensus_requested) {
        ok = ok && consensus_pass;
    }
    if (report.l2) {
        ok = ok && report.l2->pass;
    }
    if (bound_requested && report.generator_bound) {
        ok = ok && report.generator_bound->pass;
    }
    return ok;
}

SimulationResult run_simulation(const Scenario& scenario, const GainSet& gains,
                                const SimulateOptions& options)
{
    if (gains.agents.size() != scenario.agents.size()) {
        throw Error(ErrorCode::DimensionMismatch, "gain file and scenario disagree on the agent count");
    }
    const auto& tol = scenario.tolerances;
    const double horizon = options.horizon.value_or(scenario.horizon);
    const double step = options.step.value_or(scenario.step);
    const std::uint64_t seed = options.seed.value_or(scenario.seed);
    const auto disturbance = options.disturbance.value_or(scenario.disturbance);
    const LoopMode mode = gains.controller == ControllerKind::output_feedback
                              ? LoopMode::output_feedback
                              : LoopMode::state_feedback;

    auto system = build_closed_loop(scenario.agents, gains, scenario.pattern,
                                    scenario.make_schedule(horizon), disturbance, mode,
                                    scenario.resolve_initial(seed), tol);
    IntegrateOptions io;
    io.horizon = horizon;
    io.step = step;
    auto traj = integrate(system, io);

    SimulationResult r{std::move(system), std::move(traj), {}, scenario.gamma, horizon, step, seed};
    auto& rep = r.report;
    rep.positivity = audit_positivity(r.trajectory, tol.positivity_slack);
    rep.consensus = audit_consensus(r.trajectory);
    r.consensus_requested = disturbance.is_zero();
    r.consensus_pass = rep.consensus.converged(options.consensus_threshold);
    rep.kappa = auto_kappa(r.system, gains.lambda_min);
    std::vector<double> kappa;
    for (const auto& k : rep.kappa) {
        kappa.push_back(k.total());
    }
    rep.l2 = audit_l2_gain(r.trajectory, r.gamma, kappa);
    if (scenario.agents.size() > 1) {
        rep.generator_bound = audit_generator_bound(r.trajectory, gains.lambda_min);
        r.bound_requested = validate_mu(gains.mu, scenario.pattern, scenario.graphs, tol);
    }
    return r;
}

void write_trace_csv(const Trajectory& traj, std::ostream& out)
{
    const auto& lay = traj.layout;
    const auto l = traj.output_dim;
    const auto suffix = [&](Eigen::Index k) { return l == 1 ? std::string() : "_" + std::to_string(k + 1); };
    out << 't';
    for (std::size_t i = 0; i < lay.agents; ++i) {
        for (Eigen::Index k = 0; k < lay.x_size[i]; ++k) {
            out << ",x" << i + 1 << '_' << k + 1;
        }
    }
    for (std::size_t i = 0; i < lay.agents; ++i) {
        for (Eigen::Index k = 0; k < l; ++k) {
            out << ",y" << i + 1 << suffix(k);
        }
    }
    for (Eigen::Index k = 0; k < l; ++k) {
        out << ",y0" << suffix(k);
    }
    for (std::size_t i = 0; i < lay.agents; ++i) {
        for (Eigen::Index k = 0; k < l; ++k) {
            out << ",e" << i + 1 << suffix(k);
        }
    }
    for (std::size_t i = 0; i < lay.agents; ++i) {
        out << ",E2_" << i + 1;
    }
    out << ",D2\n";

    std::string line;
    const auto put = [&](double v) {
        line += ',';
        line += num(v);
    };
    for (std::size_t s = 0; s < traj.size(); ++s) {
        line = num(traj.times[s]);
        for (std::size_t i = 0; i < lay.agents; ++i) {
            const Vec x = traj.agent_state(s, i);
            for (Eigen::Index k = 0; k < x.size(); ++k) {
                put(x(k));
            }
        }
        for (Eigen::Index k = 0; k < traj.outputs[s].size(); ++k) {
            put(traj.outputs[s](k));
        }
        for (Eigen::Index k = 0; k < l; ++k) {
            put(traj.reference[s](k));
        }
        for (Eigen::Index k = 0; k < traj.errors[s].size(); ++k) {
            put(traj.errors[s](k));
        }
        for (Eigen::Index k = 0; k < traj.error_energy[s].size(); ++k) {
            put(traj.error_energy[s](k));
        }
        put(traj.disturbance_energy[s]);
        line += '\n';
        out << line;
    }
}

Json simulation_to_json(const SimulationResult& r)
{
    Json j;
    j["pass"] = r.pass();
    j["mode"] = std::string(to_string(r.system.mode));
    j["seed"] = r.seed;
    j["horizon"] = r.horizon;
    j["step"] = r.step;
    j["gamma"] = r.gamma;
    j["mu"] = r.system.mu;
    j["disturbance_zero"] = r.system.disturbance.is_zero();
    j["requested"] = {{"positivity", true},
                      {"consensus", r.consensus_requested},
                      {"l2", true},
                      {"generator_bound", r.bound_requested}};
    j["consensus_pass"] = r.consensus_pass;
    j["warnings"] = r.system.warnings;
    j["audit"] = audit_to_json(r.report);
    return j;
}

int cmd_simulate(const Scenario& scenario, const std::filesystem::path& gains_file,
                 const std::filesystem::path& out_dir, const SimulateOptions& options,
                 std::ostream& out)
{
    const auto gains = read_gains(gains_file);
    const auto r = run_simulation(scenario, gains, options);
    for (const auto& w : r.system.warnings) {
        out << "warning: " << w << '\n';
    }
    write_simulation(r, out_dir);
    print_audit(r, out);
    out << "wrote " << (out_dir / "trace.csv").string() << " and " << (out_dir / "audit.json").string()
        << '\n';
    return r.pass() ? exit_ok : exit_failure;
}

// ---- reproduce -------------------------------------------------------------

int cmd_reproduce_paper(const std::filesystem::path& out_dir, const ReproduceOptions& options,
                        std::ostream& out)
{
    ensure_dir(out_dir);
    Scenario scenario = reference_scenario();
    if (options.state_feedback) {
        scenario.controller = ControllerKind::state_feedback;
        scenario.mode = GainMode::state_feedback;
    }
    write_text(out_dir / "scenario.yaml", emit_scenario(scenario));

    out << "== check\n";
    if (cmd_check(scenario, out) != exit_ok) {
        return exit_failure;
    }

    out << "== synthesize (pinned certificates, relaxed fallback)\n";
    const auto controller = options.state_feedback ? ControllerKind::state_feedback
                                                   : ControllerKind::output_feedback;
    const auto repro = reproduce_gains(scenario, controller);
    for (const auto& n : repro.notes) {
        out << "note: " << n << '\n';
    }
    std::vector<std::optional<double>> minimal_gamma;
    if (options.gamma_bisect) {
        SynthesizeOptions so;
        for (const auto& agent : scenario.agents) {
            minimal_gamma.push_back(bisect_gamma(agent, controller, so.bisect_low, so.bisect_high,
                                                 so.bisect_resolution, scenario.tolerances));
        }
    }
    std::vector<std::string> labels;
    for (const auto& a : scenario.agents) {
        labels.push_back(a.label);
    }
    write_gains(out_dir / "gains.json", repro.gains, labels, minimal_gamma);

    // Regression against the published values.
    const auto pub = published_values();
    struct Row {
        std::string label, quantity, computed, published;
        double delta;
    };
    std::vector<Row> rows;
    double worst = 0.0;
    const auto compare = [&](const std::string& label, const std::string& what, const Mat& got,
                             const Mat& want) {
        const double d = got.rows() == want.rows() && got.cols() == want.cols()
                             ? (got - want).cwiseAbs().maxCoeff()
                             : std::numeric_limits<double>::infinity();
        worst = std::max(worst, d);
        rows.push_back({label, what, row_text(got), row_text(want), d});
    };
    for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
        const auto& g = repro.gains.agents[i];
        const auto& lab = scenario.agents[i].label;
        compare(lab, "X", g.regulator.X, pub[i].X);
        compare(lab, "U", g.regulator.U, pub[i].U);
        compare(lab, "K1", g.K1, pub[i].K1);
        compare(lab, "K2", g.K2, pub[i].K2);
        if (g.K3) {
            compare(lab, "K3", *g.K3, pub[i].K3);
        }
    }
    const bool regression_ok = worst <= 1e-3;
    out << "max regression delta " << sci(worst) << (regression_ok ? " (pass)\n" : " (FAIL)\n");

    out << "== simulate, d = 0\n";
    SimulateOptions nominal = options.simulate;
    nominal.disturbance = DisturbanceSignal::zero(1);
    const auto nom = run_simulation(scenario, repro.gains, nominal);
    write_simulation(nom, out_dir / "nominal");
    print_audit(nom, out);

    out << "== simulate, d = |sin(0.01 t)|\n";
    SimulateOptions robust = options.simulate;
    robust.disturbance = DisturbanceSignal::abs_sine(1, 1.0, 0.01);
    const auto dist = run_simulation(scenario, repro.gains, robust);
    write_simulation(dist, out_dir / "disturbed");
    print_audit(dist, out);

    std::ostringstream md;
    md << "# Eight-agent reference run\n\n";
    md << "Controller: " << to_string(controller) << ", gamma = " << num(scenario.gamma)
       << ", mu = " << num(repro.gains.mu) << ", lambda_min = " << fixed(repro.gains.lambda_min, 6)
       << ", seed = " << nom.seed << ", horizon = " << num(nom.horizon) << " s, step = " << num(nom.step)
       << " s.\n\n";
    md << "## Regression against published values\n\n";
    md << "| agent | quantity | computed | published | max abs delta |\n|---|---|---|---|---|\n";
    for (const auto& r : rows) {
        md << "| " << r.label << " | " << r.quantity << " | " << r.computed << " | " << r.published
           << " | " << sci(r.delta) << " |\n";
    }
    md << "\nWorst delta: " << sci(worst) << (regression_ok ? " (within 1e-3)" : " (exceeds 1e-3)")
       << ".\n\n";
    md << "## Certificates\n\n| agent | conditions | delta | margins |\n|---|---|---|---|\n";
    for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
        const auto& c = repro.gains.agents[i].certificate;
        md << "| " << scenario.agents[i].label << " | " << to_string(c.conditions) << " | "
           << num(c.delta) << " | " << margins_text(c.margins) << " |\n";
    }
    if (!repro.notes.empty()) {
        md << "\nDiscrepancies:\n\n";
        for (const auto& n : repro.notes) {
            md << "- " << n << "\n";
        }
    }
    if (!minimal_gamma.empty()) {
        md << "\n## Minimal gamma per agent\n\n| agent | gamma |\n|---|---|\n";
        for (std::size_t i = 0; i < minimal_gamma.size(); ++i) {
            md << "| " << scenario.agents[i].label << " | "
               << (minimal_gamma[i] ? fixed(*minimal_gamma[i]) : std::string("not found")) << " |\n";
        }
    }
    const auto section = [&](const std::string& title, const SimulationResult& r) {
        const auto& rep = r.report;
        md << "\n## " << title << "\n\n";
        md << "- positivity: " << (rep.positivity.pass ? "pass" : "FAIL") << ", min entry "
           << sci(rep.positivity.positivity_min) << "\n";
        md << "- consensus tail sup per agent:";
        for (double v : rep.consensus.tail_sup) {
            md << ' ' << sci(v);
        }
        md << (r.consensus_requested ? (r.consensus_pass ? " (pass)" : " (FAIL)") : " (not audited)") << "\n";
        if (rep.consensus.decay_rate) {
            md << "- fitted decay rate: " << fixed(*rep.consensus.decay_rate) << "\n";
        }
        if (rep.l2) {
            md << "- L2 gain: " << (rep.l2->pass ? "pass" : "FAIL") << "; disturbance energy "
               << sci(rep.l2->disturbance_energy) << "; slack per agent:";
            for (double v : rep.l2->slack) {
                md << ' ' << sci(v);
            }
            md << "\n";
        }
        if (rep.generator_bound) {
            md << "- generator bound margin: " << sci(rep.generator_bound->margin) << " ("
               << (rep.generator_bound->pass ? "pass" : "FAIL") << ")\n";
        }
        for (const auto& w : r.system.warnings) {
            md << "- warning: " << w << "\n";
        }
    };
    section("Run with d = 0", nom);
    section("Run with d = |sin(0.01 t)|", dist);
    md << "\nThe L2 inequality is checked on [0, T] only; it is necessary for, not equivalent to, the "
          "infinite-horizon bound.\n";
    write_text(out_dir / "summary.md", md.str());
    out << "wrote " << (out_dir / "summary.md").string() << '\n';

    return regression_ok && nom.pass() && dist.pass() ? exit_ok : exit_failure;
}

}  // namespace poscon
