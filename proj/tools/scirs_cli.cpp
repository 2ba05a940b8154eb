// scirs: equilibria, stability certificates and RK4 simulation of the SCIRS
// malware model. Run `scirs --help` for the subcommands.

#include <iostream>

#include "CLI11.hpp"

#include "scirs/cli.hpp"

namespace {

void add_common(CLI::App* cmd, scirs::cli::Options& o) {
    cmd->add_option("--params", o.params_path, "params file (name = value lines, or JSON)")->required();
    cmd->add_option("--out", o.out, "output file (directory for simulate)");
    cmd->add_option("--seed", o.seed, "seed for sampling and certificate search");
}

void add_integration(CLI::App* cmd, scirs::cli::Options& o) {
    cmd->add_option("--h", o.h, "RK4 step size");
    cmd->add_option("--t-end", o.t_end, "final time");
    cmd->add_option("--n-init", o.n_init, "number of initial states sampled from the feasible region");
    cmd->add_option("--tol", o.tol, "max-norm convergence tolerance");
    cmd->add_option("--stride", o.record_stride, "steps between recorded samples (default: one per time unit)");
}

void add_states(CLI::App* cmd, scirs::cli::Options& o) {
    cmd->add_option("--system", o.system, "full | limit | sir | mir");
    cmd->add_option("--init", o.inits, "explicit initial state, comma separated (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace scirs::cli;
    CLI::App app{"SCIRS malware model: equilibria, Volterra-Lyapunov stability checks and RK4 simulation"};
    // `-h` is taken by the step-size flag, so help is `--help` only (inherited by subcommands).
    app.set_help_flag("--help", "print this help message and exit");
    app.require_subcommand(1);
    Options o;

    auto* r0 = app.add_subcommand("r0", "print the basic reproduction number");
    add_common(r0, o);

    auto* eq = app.add_subcommand("equilibria", "disease-free and endemic equilibria as JSON");
    add_common(eq, o);

    auto* check = app.add_subcommand("check", "stability report and global-stability verdict as JSON");
    add_common(check, o);
    check->add_option("--budget", o.budget, "random draws for the diagonal certificate search");
    check->add_option("--c", o.legacy_c, "value of c for the geometric legacy condition");

    auto* sim = app.add_subcommand("simulate", "RK4 trajectories, one file per initial state");
    add_common(sim, o);
    add_integration(sim, o);
    add_states(sim, o);
    sim->add_option("--format", o.format, "csv | json");

    auto* phase = app.add_subcommand("phase", "phase-portrait data for several initial states");
    add_common(phase, o);
    add_integration(phase, o);
    add_states(phase, o);

    auto* sweep = app.add_subcommand("sweep", "one summary row per value of a parameter");
    add_common(sweep, o);
    add_integration(sweep, o);
    sweep->add_option("--axis", o.axis, "parameter to vary")->required();
    sweep->add_option("--values", o.values, "comma-separated values")->delimiter(',')->required();
    sweep->add_flag("--simulate", o.sweep_simulate, "also simulate and report convergence time");
    sweep->add_option("--budget", o.budget, "random draws for the diagonal certificate search");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (*r0) return cmd_r0(o, std::cout, std::cerr);
    if (*eq) return cmd_equilibria(o, std::cout, std::cerr);
    if (*check) return cmd_check(o, std::cout, std::cerr);
    if (*sim) return cmd_simulate(o, std::cout, std::cerr);
    if (*phase) return cmd_phase(o, std::cout, std::cerr);
    if (*sweep) return cmd_sweep(o, std::cout, std::cerr);
    return kExitConfig;
}
