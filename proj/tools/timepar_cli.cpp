// timepar: command-line driver for the time-parallel solver experiments.

#include "timepar/errors.hpp"
#include "timepar/experiments.hpp"
#include "timepar/parallel.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

enum Exit { ok = 0, input_error = 1, bound_violation = 2, divergence = 3 };

struct Options {
    std::string command;
    std::vector<double> h;
    std::vector<int> n;
    double final_time = 1.0;
    double omega = 0.9;
    double tol = 1e-6;
    std::optional<std::string> solver;
    std::optional<int> vcycles;
    std::vector<int> threads;
    std::uint64_t seed = 0;
    std::string out;
    std::optional<int> dim;
    std::string coefficient = "constant";
    std::string grid = "uniform";
    double perturbation = 0.0;
    std::string data = "sine";
    std::string method = "uzawa";
    std::optional<int> max_iter;
    int iterations = 10;
    int repeats = 5;
    std::vector<std::string> solvers;
};

timepar::SolverConfig solver_config(const std::string& text, const std::optional<int>& vcycles)
{
    timepar::SolverConfig config = timepar::parse_solver_config(text);
    if (vcycles && config.kind == timepar::SolverKind::mg) {
        config.vcycles = *vcycles;
    }
    return config;
}

timepar::ProblemConfig problem_config(const Options& o, double h, int n, int default_dim = 1)
{
    timepar::ProblemConfig p;
    const int dim = o.dim.value_or(default_dim);
    if (dim != 1 && dim != 2) {
        throw timepar::InputError("--dim must be 1 or 2");
    }
    p.space = dim == 1 ? timepar::SpaceDim::one : timepar::SpaceDim::two;
    p.h = h;
    p.steps = n;
    p.final_time = o.final_time;
    p.coefficient = timepar::parse_coefficient_profile(o.coefficient);
    if (o.grid == "uniform") {
        p.grid = timepar::GridKind::uniform;
    } else if (o.grid == "perturbed") {
        p.grid = timepar::GridKind::perturbed;
    } else {
        throw timepar::InputError("--grid must be uniform or perturbed");
    }
    p.perturbation = o.perturbation;
    if (o.data == "sine") {
        p.data = timepar::DataKind::sine_initial;
    } else if (o.data == "manufactured") {
        p.data = timepar::DataKind::manufactured;
    } else {
        throw timepar::InputError("--data must be sine or manufactured");
    }
    p.seed = o.seed;
    return p;
}

double single_h(const Options& o)
{
    if (o.h.size() != 1) {
        throw timepar::InputError(o.command + " takes exactly one --h value");
    }
    return o.h.front();
}

int single_n(const Options& o)
{
    if (o.n.size() != 1) {
        throw timepar::InputError(o.command + " takes exactly one --N value");
    }
    return o.n.front();
}

int run(const Options& o, std::ostream& out)
{
    using namespace timepar;
    if (o.command == "table1") {
        const auto h = o.h.empty() ? std::vector<double>{1.0 / 64, 1.0 / 128} : o.h;
        const auto n = o.n.empty() ? std::vector<int>{4, 8, 16, 32, 64, 128, 256, 512, 1024} : o.n;
        write_table1_csv(out, run_table1(h, n));
        return ok;
    }
    if (o.command == "table2") {
        const auto h = o.h.empty() ? std::vector<double>{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64} : o.h;
        const auto n = o.n.empty() ? std::vector<int>{128, 256, 512, 1024} : o.n;
        Table2Options t;
        t.vcycles = o.vcycles.value_or(1);
        t.omega = o.omega;
        t.tol = o.tol;
        t.max_iter = o.max_iter.value_or(200);
        const auto rows = run_table2(h, n, t);
        write_table2_csv(out, rows);
        for (const auto& r : rows) {
            if (!r.converged) {
                std::cerr << "table2: cell h=" << r.h << " N=" << r.steps << " did not converge\n";
                return bound_violation;
            }
        }
        return ok;
    }
    if (o.command == "history") {
        HistoryOptions hist;
        const double h = o.h.empty() ? 1.0 / 64 : single_h(o);
        const int n = o.n.empty() ? 512 : single_n(o);
        hist.problem = problem_config(o, h, n, 2);
        for (const auto& s : o.solvers) {
            hist.solvers.push_back(parse_solver_config(s));
        }
        hist.omega = o.omega;
        hist.tol = o.tol;
        hist.max_iter = o.max_iter.value_or(60);
        const auto histories = run_history(hist);
        write_history_csv(out, histories);
        for (const auto& hst : histories) {
            if (!hst.converged) {
                std::cerr << "history: " << hst.solver << " did not converge\n";
                return bound_violation;
            }
        }
        return ok;
    }
    if (o.command == "spectral-check") {
        const ProblemSpec spec = make_problem(problem_config(o, single_h(o), single_n(o)));
        const SpectralReport report = run_spectral_check(spec, solver_config(o.solver.value_or("direct"), o.vcycles));
        write_spectral_csv(out, {report});
        if (!report.pass) {
            std::cerr << "spectral-check: eigenvalues [" << report.lam_lo << ", " << report.lam_hi
                      << "] violate the bounds [" << report.bound_lo << ", " << report.bound_hi << "]"
                      << " (exact pencil [" << report.exact_lo << ", " << report.exact_hi << "])\n";
            return bound_violation;
        }
        return ok;
    }
    if (o.command == "scaling") {
        ScalingOptions s;
        const double h = o.h.empty() ? 1.0 / 128 : single_h(o);
        const int n = o.n.empty() ? 1024 : single_n(o);
        s.problem = problem_config(o, h, n);
        s.solver = solver_config(o.solver.value_or("mg"), o.vcycles);
        if (!o.threads.empty()) {
            s.threads = o.threads;
        }
        s.iterations = o.iterations;
        s.repeats = o.repeats;
        write_scaling_csv(out, run_scaling(s));
        return ok;
    }
    // solve
    SolveOptions s;
    s.problem = problem_config(o, single_h(o), single_n(o));
    s.solver = solver_config(o.solver.value_or("direct"), o.vcycles);
    s.method = o.method;
    s.omega = o.omega;
    s.tol = o.tol;
    s.max_iter = o.max_iter.value_or(500);
    const SolveReport report = run_solve(s);
    report.history.write_csv(out);
    const auto& last = report.history.last();
    std::cerr << report.history.solver << ": " << report.history.iterations << " iterations, residual "
              << last.residual << ", relative difference to sequential Euler " << report.euler_difference;
    if (report.rho_A > 0.0) {
        std::cerr << ", rho_A ~ " << report.rho_A;
    }
    std::cerr << '\n';
    return report.history.converged ? ok : bound_violation;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"timepar: time-parallel implicit Euler solver experiments"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.allow_config_extras(false);
    app.set_config("--config", "", "key=value file mirroring the flags (flags on the command line win)");

    Options o;
    app.add_option("command", o.command, "solve | table1 | table2 | history | spectral-check | scaling")
        ->required()
        ->check(CLI::IsMember({"solve", "table1", "table2", "history", "spectral-check", "scaling"}));
    app.add_option("--h", o.h, "mesh size(s), comma separated")->delimiter(',');
    app.add_option("--N", o.n, "number(s) of time steps, comma separated")->delimiter(',');
    app.add_option("--T", o.final_time, "final time")->capture_default_str();
    app.add_option("--omega", o.omega, "Uzawa damping")->capture_default_str();
    app.add_option("--tol", o.tol, "relative stopping tolerance")->capture_default_str();
    app.add_option("--solver", o.solver, "spatial solver: direct | jacobi[:sweeps] | mg[:vcycles]");
    app.add_option("--vcycles", o.vcycles, "V-cycles per multigrid application");
    app.add_option("--threads", o.threads, "worker threads (list for scaling)")->delimiter(',');
    app.add_option("--seed", o.seed, "random seed")->capture_default_str();
    app.add_option("--out", o.out, "CSV output path (default stdout)");
    app.add_option("--dim", o.dim, "space dimension 1 or 2 (history defaults to 2)");
    app.add_option("--coefficient", o.coefficient, "constant | step | smooth")->capture_default_str();
    app.add_option("--grid", o.grid, "uniform | perturbed")->capture_default_str();
    app.add_option("--perturbation", o.perturbation, "relative step perturbation for perturbed grids")
        ->capture_default_str();
    app.add_option("--data", o.data, "sine | manufactured")->capture_default_str();
    app.add_option("--method", o.method, "uzawa | minres")->capture_default_str();
    app.add_option("--max-iter", o.max_iter, "iteration limit");
    app.add_option("--iterations", o.iterations, "Uzawa iterations per scaling run")->capture_default_str();
    app.add_option("--repeats", o.repeats, "timed runs per thread count")->capture_default_str();
    app.add_option("--solvers", o.solvers, "solver kinds for history, comma separated")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return input_error;
    }

    if ((o.command == "solve" || o.command == "spectral-check") && (o.h.empty() || o.n.empty())) {
        std::cerr << o.command << " requires --h and --N\n" << app.help();
        return input_error;
    }

    try {
        if (o.command != "scaling" && !o.threads.empty()) {
            if (o.threads.size() != 1) {
                throw timepar::InputError("--threads takes a single value except for scaling");
            }
            timepar::set_num_threads(o.threads.front());
        }
        if (o.out.empty()) {
            return run(o, std::cout);
        }
        std::ofstream file(o.out);
        if (!file) {
            throw timepar::InputError("cannot open output file " + o.out);
        }
        return run(o, file);
    } catch (const timepar::DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return divergence;
    } catch (const timepar::BoundViolation& e) {
        std::cerr << "error: " << e.what() << '\n';
        return bound_violation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return input_error;
    }
}
