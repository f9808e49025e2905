#include "scenario.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>

using namespace laxflow;
using namespace laxflow::app;

namespace {

struct Common {
    std::optional<double> tol;
    std::string out_dir = "laxflow-out";
    std::optional<std::uint64_t> seed;
    std::string format = "csv";
};

void add_common(CLI::App* sc, Common& c) {
    sc->add_option("--tol", c.tol, "verdict tolerance of the analysis");
    sc->add_option("--out-dir", c.out_dir, "output directory")->capture_default_str();
    sc->add_option("--seed", c.seed, "random seed (overrides the scenario)");
    sc->add_option("--format", c.format, "table format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
}

int emit(const Section& sec, const Common& c, const json* trajectory = nullptr) {
    json rep = sec.report;
    rep["pass"] = sec.pass;
    std::filesystem::path dir(c.out_dir);
    io::write_text(dir / "report.json", io::dump(rep));
    if (trajectory) io::write_text(dir / "trajectory.json", io::dump(*trajectory));
    write_tables(sec.tables, dir / "tables", c.format);
    std::cout << io::dump(rep);
    return sec.pass ? 0 : 1;
}

Generator generator_of(const json& tr) {
    if (!tr.contains("generator")) throw Error(Errc::Configuration, "trajectory has no generator record");
    return Generator::from_json(tr["generator"]);
}

Scenario scenario_file(const std::string& path, const Common& c, std::optional<std::vector<std::string>> force = std::nullopt) {
    json j = io::read_json(path);
    if (force && !j.contains("analyses")) j["analyses"] = *force;
    Scenario s = parse_scenario(j, std::filesystem::path(path).parent_path());
    if (c.seed) s.seed = *c.seed;
    if (c.tol) override_tolerance(s, *c.tol);
    return s;
}

Tolerances tolerances(const Common& c, double Tolerances::*field) {
    Tolerances t;
    if (c.tol) t.*field = *c.tol;
    return t;
}

int bench() {
    using clk = std::chrono::steady_clock;
    auto time = [](const char* what, auto&& fn) {
        auto t0 = clk::now();
        fn();
        std::printf("%-28s %10.3f ms\n", what, std::chrono::duration<double, std::milli>(clk::now() - t0).count());
    };
    Scenario s = builtin_scenario("mumford-g1");
    KricheverLax L = load_lax(s);
    Trajectory tr;
    time("spectral", [&] { analyze_spectral(L, s.tol); });
    time("flow (rk4, 1000 steps)", [&] { analyze_flow(L, s, tr); });
    time("linearity", [&] { analyze_linearity(tr, s.generator, s.tol, 0); });
    time("abel", [&] { analyze_abel(tr, s.generator, s.tol); });
    time("hamiltonian", [&] { analyze_hamiltonian(L, &tr, s); });
    auto c = BaseCurve::hyperelliptic(Poly{1.0, 1.0, 0.0, 0.0, 0.0, 1.0});
    Divisor K = canonical_divisor(*c);
    std::mt19937_64 rng(1);
    KricheverLax LK;
    time("construct_lax (g=2, l=2)", [&] { LK = construct_lax(c, K, sample_params(c, K, 2, rng)); });
    time("moving pole (20 steps)", [&] { integrate_moving_pole(LK, {{{Place::infinity(), 1, 1}}, std::nullopt}, 0.05, 2.5e-3); });
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lax flows on spaces of Krichever-Lax matrices"};
    app.require_subcommand(1);
    Common c;
    std::string input, builtin;

    auto* v = app.add_subcommand("validate", "check a Lax matrix JSON against its Tyurin constraints");
    auto* sp = app.add_subcommand("spectral", "spectral curve, branch points and eigenvector divisor of a Lax matrix");
    auto* fl = app.add_subcommand("flow", "integrate dL/dt = [M, L] from a flow configuration");
    auto* li = app.add_subcommand("linearity", "constancy, linearity and equivalence verdicts along a trajectory");
    auto* ab = app.add_subcommand("abel", "Abel-Jacobi images along a trajectory");
    auto* ha = app.add_subcommand("hamiltonian", "residue Hamiltonians of a Lax matrix or along a trajectory");
    auto* ru = app.add_subcommand("run", "run a scenario");
    auto* be = app.add_subcommand("bench", "time the pipeline stages");
    for (auto* sc : {v, sp, fl, li, ab, ha}) {
        sc->add_option("input", input, "input JSON")->required();
        add_common(sc, c);
    }
    ru->add_option("scenario", input, "scenario JSON");
    ru->add_option("--builtin", builtin, "builtin scenario (mumford-g1)");
    add_common(ru, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cout << io::dump(error_json("Configuration", e.what()));
        return 2;
    }

    try {
        if (be->parsed()) return bench();
        if (v->parsed()) return emit(analyze_validate(io::read_json(input), tolerances(c, &Tolerances::validate)), c);
        if (sp->parsed()) return emit(analyze_spectral(io::lax_from(io::read_json(input)), tolerances(c, &Tolerances::eigen)), c);
        if (fl->parsed()) {
            Scenario s = scenario_file(input, c, std::vector<std::string>{"flow"});
            Trajectory tr;
            Section sec = analyze_flow(load_lax(s), s, tr);
            json tj = trajectory_json(tr, s.generator);
            return emit(sec, c, &tj);
        }
        if (li->parsed() || ab->parsed()) {
            json tj = io::read_json(input);
            Trajectory tr = io::trajectory_from(tj);
            Generator g = generator_of(tj);
            if (li->parsed()) return emit(analyze_linearity(tr, g, tolerances(c, &Tolerances::linearity), c.seed.value_or(0)), c);
            return emit(analyze_abel(tr, g, tolerances(c, &Tolerances::second_difference)), c);
        }
        if (ha->parsed()) {
            json j = io::read_json(input);
            Scenario s;
            s.tol = tolerances(c, &Tolerances::hamiltonian);
            s.seed = c.seed.value_or(0);
            if (j.contains("samples")) {
                Trajectory tr = io::trajectory_from(j);
                s.generator = generator_of(j);
                return emit(analyze_hamiltonian(tr.samples.front().L, &tr, s), c);
            }
            return emit(analyze_hamiltonian(io::lax_from(j), nullptr, s), c);
        }
        if (ru->parsed()) {
            if (input.empty() == builtin.empty()) throw Error(Errc::Configuration, "run needs exactly one of <scenario> or --builtin");
            Scenario s = builtin.empty() ? scenario_file(input, c) : builtin_scenario(builtin);
            if (!builtin.empty()) {
                if (c.seed) s.seed = *c.seed;
                if (c.tol) override_tolerance(s, *c.tol);
            }
            Outcome o = run_scenario(s, c.out_dir, c.format);
            std::cout << io::dump(o.report["summary"]);
            return o.exit_code;
        }
    } catch (const Error& e) {
        json err = error_json(errc_name(e.code()), e.what());
        std::cout << io::dump(err);
        if (e.code() == Errc::Configuration) {
            try {
                io::write_text(std::filesystem::path(c.out_dir) / "error.json", io::dump(err));
            } catch (const Error&) {
            }
            return 2;
        }
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cout << io::dump(error_json("Configuration", e.what()));
        return 2;
    }
    return 2;
}
