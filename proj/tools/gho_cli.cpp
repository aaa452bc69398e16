// gho: batch front-end for the generalized oscillator library.
//
//   gho verify      --scenario sho.yaml
//   gho kernel-scan --scenario free.yaml --grid -5,5,21 --times 0,1 --out results/
//   gho modes       --scenario sho.yaml --modes 0..3 --times 0
//   gho evolve | invariant | coherent ...

#include <iostream>

#include <CLI11.hpp>

#include "gho/cli.hpp"

int main(int argc, char** argv) {
    using namespace gho::cli;

    CLI::App app{"Generalized harmonic oscillator: kernels, modes, oracles"};
    app.require_subcommand(1);

    std::string scenario, out_dir = ".", grid, times, modes, basis = "default", xp;
    std::vector<std::string> tolerances;

    const char* commands[][2] = {
        {"verify", "run the property suite and print CHECK lines"},
        {"kernel-scan", "kernel over an endpoint grid (kernel_scan.csv)"},
        {"evolve", "analytic and grid evolution of a mode (evolve.csv, packet_t*.csv)"},
        {"modes", "eigenmode packets (modes.csv, mode_n*_t*.csv)"},
        {"invariant", "<I> along grid evolution (invariant.csv)"},
        {"coherent", "generalized coherent/squeezed states (coherent.csv, classical.csv)"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--scenario", scenario, "scenario YAML file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--grid", grid, "xmin,xmax,n");
        sub->add_option("--times", times, "t0,t1,...");
        sub->add_option("--modes", modes, "n0..n1");
        sub->add_option("--basis", basis, "default | custom:u0,udot0,v0,vdot0");
        sub->add_option("--xp", xp, "x0,xdot0 of the particular solution");
        sub->add_option("--tol", tolerances, "name=value (repeatable)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputError;
    }

    ExperimentSpec spec;
    spec.command = app.get_subcommands().front()->get_name();
    spec.scenario_path = scenario;
    spec.out_dir = out_dir;
    try {
        if (!grid.empty()) spec.grid = parse_grid(grid);
        if (!times.empty()) spec.times = parse_times(times);
        if (!modes.empty()) spec.modes = parse_modes(modes);
        spec.basis = parse_basis(basis);
        if (!xp.empty()) spec.xp = parse_xp(xp);
        for (const auto& t : tolerances) spec.tolerances.insert(parse_tolerance(t));
    } catch (const std::exception& e) {
        std::cerr << "gho " << spec.command << ": " << e.what() << '\n';
        return kExitInputError;
    }
    return run(spec, std::cout, std::cerr);
}
