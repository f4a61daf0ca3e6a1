#include <iostream>
#include <numbers>

#include <CLI11.hpp>

#include "commands.hpp"
#include "polyspec/errors.hpp"
#include "polyspec/smoothing.hpp"

using namespace polyspec;

namespace {

constexpr int exit_validation = 2;
constexpr int exit_budget = 3;

void add_common(CLI::App* cmd, cli::Common& common) {
    cmd->add_option("--threads", common.threads,
                    "Worker threads (default: $POLYSPEC_THREADS or all cores); never changes the output");
    cmd->add_option("--format", common.format, "Output format: csv|json|text")
        ->check(CLI::IsMember({"csv", "json", "text"}));
    cmd->add_option("-o,--out", common.out, "Write output to this file instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polyspec: polygon configuration volumes and smoothed joint spectral measures of flat tori"};
    app.set_version_flag("--version", std::string(version_string()));
    app.require_subcommand(1);

    cli::Common common;

    cli::ClassifyArgs classify_args;
    auto* classify = app.add_subcommand("classify", "Classify tau as Good, Bad or Degenerate");
    classify->add_option("--tau", classify_args.tau, "Comma-separated tau_1..tau_{k+1}")->required();
    classify->add_option("--tol", classify_args.tol, "Relative tolerance (0: exact)");
    classify->add_flag("--squared", classify_args.squared, "Entries are integer squared frequencies");
    add_common(classify, common);

    cli::VolumeArgs volume_args;
    auto* volume = app.add_subcommand("volume", "Leray volume of the (k+1)-gon configuration space");
    volume->add_option("-n", volume_args.n, "Ambient dimension")->required();
    volume->add_option("-k", volume_args.k, "Number of free sides (checked against --tau)");
    volume->add_option("--tau", volume_args.tau, "Comma-separated tau_1..tau_{k+1}")->required();
    volume->add_option("--method", volume_args.method, "quadrature|mc|closed-form")
        ->check(CLI::IsMember({"quadrature", "mc", "closed-form"}));
    volume->add_option("--seed", volume_args.seed, "Monte Carlo seed");
    volume->add_option("--samples", volume_args.samples, "Monte Carlo sample count");
    volume->add_option("--rel-tol", volume_args.rel_tol, "Quadrature relative tolerance");
    add_common(volume, common);

    cli::TorusArgs torus_args;
    auto* torus = app.add_subcommand("torus", "Exact joint spectral measure of the flat torus");
    torus->add_option("-n", torus_args.n, "Ambient dimension (default 2)");
    torus->add_option("-k", torus_args.k, "Number of free frequencies (checked against --window)");
    torus->add_option("--window", torus_args.window, "Frequency window lo:hi,... with k+1 intervals");
    torus->add_flag("--verify-bad", torus_args.verify_bad, "Enumerate the bad tail beyond (1+eps) sum(tau)");
    torus->add_option("--tau", torus_args.tau, "tau_1..tau_k for --verify-bad");
    torus->add_option("--eps", torus_args.eps, "Relative gap for --verify-bad");
    torus->add_option("--cap", torus_args.cap, "Upper frequency cap for --verify-bad (default 2(1+eps) sum(tau))");
    torus->add_flag("--boundary-family", torus_args.boundary_family, "Collinear boundary witness");
    torus->add_option("--v", torus_args.v, "Nonzero lattice vector for --boundary-family");
    torus->add_option("--r", torus_args.r, "Positive multipliers r_1..r_k for --boundary-family");
    torus->add_option("--max-tuples", torus_args.max_tuples, "Enumeration budget (estimated tuples)");
    torus->add_option("--max-atoms", torus_args.max_atoms, "Cap on materialized atoms");
    add_common(torus, common);

    cli::SweepArgs sweep_args;
    sweep_args.a = default_kernel_halfwidth;
    auto* sweep = app.add_subcommand("sweep", "Smoothed measure against the main term along r * tau0");
    sweep->add_option("-n", sweep_args.n, "Ambient dimension (default 2; 3 with --scaling-only)");
    sweep->add_option("-k", sweep_args.k, "Number of free sides (checked against --tau0)");
    sweep->add_option("--tau0,--tau", sweep_args.tau0, "Direction tau0 (k+1 entries)");
    sweep->add_option("--r", sweep_args.r, "Increasing comma-separated scale factors");
    sweep->add_option("--a", sweep_args.a, "Kernel Fourier halfwidth, must lie in (0, pi)");
    sweep->add_option("--route", sweep_args.route, "lattice|atoms")->check(CLI::IsMember({"lattice", "atoms"}));
    sweep->add_option("--cutoff-tol", sweep_args.cutoff_tol, "Kernel truncation level");
    sweep->add_flag("--scaling-only", sweep_args.scaling_only, "Only check vol(r tau) = r^d vol(tau)");
    sweep->add_option("--summary", sweep_args.summary, "Also write the JSON summary to this file");
    sweep->add_option("--method", sweep_args.method, "Volume method for --scaling-only")
        ->check(CLI::IsMember({"quadrature", "mc", "closed-form"}));
    sweep->add_option("--seed", sweep_args.seed, "Monte Carlo seed for --scaling-only");
    sweep->add_option("--samples", sweep_args.samples, "Monte Carlo samples for --scaling-only");
    add_common(sweep, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_validation;
    }

    try {
        if (*classify) return cli::run_classify(classify_args, common);
        if (*volume) return cli::run_volume(volume_args, common);
        if (*torus) return cli::run_torus(torus_args, common);
        if (*sweep) return cli::run_sweep(sweep_args, common);
    } catch (const HypothesisViolation& e) {
        std::cerr << "hypothesis violation: " << e.what() << '\n';
        return exit_validation;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return exit_validation;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        return exit_budget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
