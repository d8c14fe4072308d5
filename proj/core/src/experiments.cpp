#include "timepar/experiments.hpp"

#include "timepar/csv.hpp"
#include "timepar/dst.hpp"
#include "timepar/eigen_extremal.hpp"
#include "timepar/errors.hpp"
#include "timepar/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>

namespace timepar {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool is_power_of_two(int n)
{
    return n > 0 && (n & (n - 1)) == 0;
}

double median(std::vector<double> values)
{
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

/// Dense matrix of a block operator, column by column.
Eigen::MatrixXd dense_block_operator(Index dim, Index steps, const BlockOperator& op)
{
    const Index n = dim * steps;
    Eigen::MatrixXd out(n, n);
    BlockVector e(dim, steps);
    BlockVector col;
    for (Index j = 0; j < n; ++j) {
        e.data().data()[j] = 1.0;
        op(e, col);
        out.col(j) = Eigen::Map<const Eigen::VectorXd>(col.data().data(), n);
        e.data().data()[j] = 0.0;
    }
    return 0.5 * (out + out.transpose());
}

}  // namespace

CoefficientProfile parse_coefficient_profile(const std::string& text)
{
    if (text == "constant") {
        return CoefficientProfile::constant;
    }
    if (text == "step") {
        return CoefficientProfile::step;
    }
    if (text == "smooth") {
        return CoefficientProfile::smooth;
    }
    throw InputError("unknown coefficient profile '" + text + "' (expected constant, step or smooth)");
}

std::string to_string(CoefficientProfile profile)
{
    switch (profile) {
    case CoefficientProfile::constant:
        return "constant";
    case CoefficientProfile::step:
        return "step";
    case CoefficientProfile::smooth:
        return "smooth";
    }
    return "constant";
}

Coefficient make_coefficient(CoefficientProfile profile, double final_time)
{
    switch (profile) {
    case CoefficientProfile::step:
        return [final_time](double t) { return t <= 0.5 * final_time ? 2.0 : 1.0; };
    case CoefficientProfile::smooth:
        return [final_time](double t) { return 1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * t / final_time); };
    case CoefficientProfile::constant:
        break;
    }
    return [](double) { return 1.0; };
}

int cells_from_h(double h)
{
    if (!(h > 0.0) || h > 0.5) {
        throw InputError("mesh size h must lie in (0, 1/2]");
    }
    const double inv = 1.0 / h;
    const double rounded = std::round(inv);
    if (std::abs(inv - rounded) > 1e-9 * inv || rounded > 1e7) {
        throw InputError("1/h must be an integer, got h = " + format_double(h));
    }
    return static_cast<int>(rounded);
}

ProblemSpec make_problem(const ProblemConfig& config)
{
    if (config.steps < 1) {
        throw InputError("the number of time steps must be at least 1");
    }
    if (!(config.final_time > 0.0)) {
        throw InputError("the final time must be positive");
    }
    HeatProblemOptions options;
    options.space = config.space;
    options.cells = cells_from_h(config.h);
    options.coefficient = make_coefficient(config.coefficient, config.final_time);
    options.data = config.data;
    const TimeGrid grid =
        build_time_grid(config.grid, config.steps, config.final_time, config.perturbation, config.seed);
    ProblemSpec spec = make_heat_problem(options, grid);
    spec.seed = config.seed;
    return spec;
}

std::shared_ptr<const MgHierarchy> hierarchy_for(const ProblemSpec& spec)
{
    if (!spec.mesh || spec.mesh->cells < 4 || !is_power_of_two(spec.mesh->cells)) {
        return nullptr;
    }
    return build_mg_hierarchy(spec.mesh->space, spec.mesh->cells);
}

// ---- Table 1 ----------------------------------------------------------

Table1Row table1_cell(double h, int steps, const Table1Options& options)
{
    const auto start = Clock::now();
    ProblemConfig config;
    config.h = h;
    config.steps = steps;
    const ProblemSpec spec = make_problem(config);
    const Index dim = spec.dim();
    const Index n_steps = spec.steps();
    const double tau = spec.tau_ref;

    Table1Row row;
    row.h = h;
    row.steps = steps;

    if (dim * n_steps <= options.dense_limit) {
        const Eigen::MatrixXd md = spec.mass.to_dense();
        const Eigen::MatrixXd ad = spec.reference.materialize().to_dense();
        const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> modes(ad, md, Eigen::EigenvaluesOnly);
        const Eigen::VectorXd lambda = modes.eigenvalues();

        Eigen::MatrixXd kt = Eigen::MatrixXd::Identity(n_steps, n_steps);
        for (Index n = 1; n < n_steps; ++n) {
            kt(n, n - 1) = -1.0;
        }
        const Eigen::MatrixXd ktk = kt.transpose() * kt;
        const Eigen::MatrixXd ksym = kt + kt.transpose();

        const DstPlan plan(n_steps);
        Eigen::MatrixXd phi(n_steps, n_steps);
        std::vector<double> unit(static_cast<std::size_t>(n_steps), 0.0);
        std::vector<double> col(static_cast<std::size_t>(n_steps));
        for (Index j = 0; j < n_steps; ++j) {
            unit[static_cast<std::size_t>(j)] = 1.0;
            plan.forward(unit, col);
            phi.col(j) = Eigen::Map<const Eigen::VectorXd>(col.data(), n_steps);
            unit[static_cast<std::size_t>(j)] = 0.0;
        }
        const Eigen::VectorXd mu = dst_frequencies(n_steps);

        std::vector<ExtremalEigenvalues> per_mode(static_cast<std::size_t>(dim));
        parallel_for(dim, [&](std::ptrdiff_t j) {
            const double tl = tau * lambda(j);
            const Eigen::MatrixXd s = ktk / tl + ksym + tl * Eigen::MatrixXd::Identity(n_steps, n_steps);
            const Eigen::VectorXd hat =
                (0.5 * n_steps / tau) * (mu.array() + tl).square() / lambda(j);
            Eigen::MatrixXd hj = phi.transpose() * hat.asDiagonal() * phi;
            hj = 0.5 * (hj + hj.transpose()).eval();
            per_mode[static_cast<std::size_t>(j)] = dense_generalized_eig_extremal(s, hj);
        });
        row.lambda_min = per_mode.front().min;
        row.lambda_max = per_mode.front().max;
        for (const auto& ev : per_mode) {
            row.lambda_min = std::min(row.lambda_min, ev.min);
            row.lambda_max = std::max(row.lambda_max, ev.max);
        }
        row.lanczos = false;
    } else {
        const TimeGlobalSystem system(spec, true);
        const SchurPreconditioner h_exact(spec, SolverConfig{SolverKind::direct});
        BlockVector tmp;
        BlockOperator op = [&](const BlockVector& in, BlockVector& out) {
            system.apply_S(in, tmp);
            h_exact.apply_Hinv(tmp, out);
        };
        BlockOperator inner = [&](const BlockVector& in, BlockVector& out) { h_exact.apply_H(in, out); };
        std::mt19937_64 rng(spec.seed);
        LanczosOptions lopt;
        lopt.max_iterations = options.lanczos_iterations;
        lopt.tolerance = options.lanczos_tol;
        const LanczosResult res = lanczos_extremal_eig(op, inner, BlockVector::random(dim, n_steps, rng), lopt);
        row.lambda_min = res.min;
        row.lambda_max = res.max;
        row.lanczos = true;
        row.iterations = res.iterations;
    }
    row.kappa = row.lambda_max / row.lambda_min;
    row.seconds = seconds_since(start);
    return row;
}

std::vector<Table1Row> run_table1(const std::vector<double>& h_list, const std::vector<int>& n_list,
                                  const Table1Options& options)
{
    std::vector<Table1Row> rows;
    for (const double h : h_list) {
        for (const int n : n_list) {
            rows.push_back(table1_cell(h, n, options));
        }
    }
    return rows;
}

void write_table1_csv(std::ostream& out, const std::vector<Table1Row>& rows)
{
    CsvWriter csv(out);
    csv.header({"h", "N", "lambda_min", "lambda_max", "kappa"});
    for (const auto& r : rows) {
        csv.row().add(r.h).add(r.steps).add(r.lambda_min).add(r.lambda_max).add(r.kappa).end();
    }
}

// ---- Table 2 ----------------------------------------------------------

Table2Row table2_cell(double h, int steps, const Table2Options& options)
{
    const auto start = Clock::now();
    ProblemConfig config;
    config.space = SpaceDim::two;
    config.h = h;
    config.steps = steps;
    const ProblemSpec spec = make_problem(config);
    const auto hierarchy = hierarchy_for(spec);
    if (!hierarchy) {
        throw InputError("table2: 1/h must be a power of two >= 4 for the multigrid solvers");
    }
    SolverConfig mg{SolverKind::mg};
    mg.vcycles = options.vcycles;

    const BlockVector reference = sequential_euler_solve(spec);
    const TimeGlobalSystem system(spec, true);
    const StepPreconditioner a_tilde(spec, mg, hierarchy);
    const SchurPreconditioner h_tilde(spec, mg, hierarchy);

    UzawaConfig cfg;
    cfg.omega = options.omega;
    cfg.tol = options.tol;
    cfg.max_iter = options.max_iter;
    cfg.stopping = StoppingRule::s_norm_error;
    cfg.record_history = false;
    const SolveResult result = uzawa_solve(system, a_tilde, h_tilde, cfg, Reference{&reference});

    Table2Row row;
    row.h = h;
    row.steps = steps;
    row.iterations = result.history.iterations;
    row.converged = result.history.converged;
    row.seconds = seconds_since(start);
    return row;
}

std::vector<Table2Row> run_table2(const std::vector<double>& h_list, const std::vector<int>& n_list,
                                  const Table2Options& options)
{
    std::vector<Table2Row> rows;
    for (const double h : h_list) {
        for (const int n : n_list) {
            rows.push_back(table2_cell(h, n, options));
        }
    }
    return rows;
}

void write_table2_csv(std::ostream& out, const std::vector<Table2Row>& rows)
{
    CsvWriter csv(out);
    csv.header({"h", "N", "iterations"});
    for (const auto& r : rows) {
        csv.row().add(r.h).add(r.steps).add(r.iterations).end();
    }
}

// ---- History ----------------------------------------------------------

std::vector<ConvergenceHistory> run_history(const HistoryOptions& options)
{
    std::vector<SolverConfig> solvers = options.solvers;
    if (solvers.empty()) {
        SolverConfig mg1{SolverKind::mg};
        SolverConfig mg2{SolverKind::mg};
        mg2.vcycles = 2;
        solvers = {SolverConfig{SolverKind::direct}, mg1, mg2};
    }
    const ProblemSpec spec = make_problem(options.problem);
    const BlockVector reference = sequential_euler_solve(spec);
    const TimeGlobalSystem system(spec, true);
    std::shared_ptr<const MgHierarchy> hierarchy;

    std::vector<ConvergenceHistory> histories;
    for (const auto& solver : solvers) {
        if (solver.kind == SolverKind::mg && !hierarchy) {
            hierarchy = hierarchy_for(spec);
            if (!hierarchy) {
                throw InputError("history: multigrid needs 1/h to be a power of two >= 4");
            }
        }
        const StepPreconditioner a_tilde(spec, solver, hierarchy);
        const SchurPreconditioner h_tilde(spec, solver, hierarchy);
        UzawaConfig cfg;
        cfg.omega = options.omega;
        cfg.tol = options.tol;
        cfg.max_iter = options.max_iter;
        cfg.stopping = StoppingRule::s_norm_error;
        SolveResult result = uzawa_solve(system, a_tilde, h_tilde, cfg, Reference{&reference});
        result.history.solver = to_string(solver);
        histories.push_back(std::move(result.history));
    }
    return histories;
}

void write_history_csv(std::ostream& out, const std::vector<ConvergenceHistory>& histories)
{
    CsvWriter csv(out);
    csv.header({"iter", "solver", "s_norm_error", "residual"});
    for (const auto& history : histories) {
        for (const auto& e : history.entries) {
            csv.row().add(e.iter).add(history.solver).add(e.s_norm_error).add(e.residual).end();
        }
    }
}

// ---- Spectral check ---------------------------------------------------

SpectralReport run_spectral_check(const ProblemSpec& spec, const SolverConfig& solver, double slack,
                                  Index dense_limit)
{
    spec.validate();
    const Index dim = spec.dim();
    const Index steps = spec.steps();
    if (dim * steps > dense_limit) {
        throw DenseLimitExceeded("spectral check: dim * N = " + std::to_string(dim * steps) +
                                 " exceeds the dense limit " + std::to_string(dense_limit));
    }
    const auto hierarchy = solver.kind == SolverKind::mg ? hierarchy_for(spec) : nullptr;
    if (solver.kind == SolverKind::mg && !hierarchy) {
        throw InputError("spectral check: multigrid needs 1/h to be a power of two >= 4");
    }
    const TimeGlobalSystem system(spec, true);
    const SchurPreconditioner h_exact(spec, SolverConfig{SolverKind::direct});

    SpectralReport report;
    report.alpha = spec.alpha;

    const Eigen::MatrixXd s = dense_block_operator(dim, steps, [&](const BlockVector& in, BlockVector& out) {
        system.apply_S(in, out);
    });
    const Eigen::MatrixXd h = dense_block_operator(dim, steps, [&](const BlockVector& in, BlockVector& out) {
        h_exact.apply_H(in, out);
    });
    const ExtremalEigenvalues exact = dense_generalized_eig_extremal(s, h, dense_limit);
    report.exact_lo = exact.min;
    report.exact_hi = exact.max;
    const double exact_lo_bound = 1.0 / (2.0 * report.alpha);
    const double exact_hi_bound = 3.0 * report.alpha;
    report.exact_pass = exact.min >= exact_lo_bound - slack * std::max(1.0, exact_lo_bound) &&
                        exact.max <= exact_hi_bound + slack * std::max(1.0, exact_hi_bound);

    if (solver.kind == SolverKind::direct) {
        report.gamma = 1.0;
        report.Gamma = 1.0;
        report.lam_lo = exact.min;
        report.lam_hi = exact.max;
    } else {
        const SchurPreconditioner h_tilde(spec, solver, hierarchy);
        std::vector<GammaEstimate> per_k(static_cast<std::size_t>(steps));
        parallel_for(steps, [&](std::ptrdiff_t k) {
            per_k[static_cast<std::size_t>(k)] =
                estimate_gamma_Gamma(h_tilde.Hk(k), h_tilde.solver(k), h_tilde.reference());
        });
        report.gamma = per_k.front().gamma;
        report.Gamma = per_k.front().Gamma;
        for (const auto& e : per_k) {
            report.gamma = std::min(report.gamma, e.gamma);
            report.Gamma = std::max(report.Gamma, e.Gamma);
        }
        const Eigen::MatrixXd hinv = dense_block_operator(dim, steps, [&](const BlockVector& in, BlockVector& out) {
            h_tilde.apply_Hinv(in, out);
        });
        const Eigen::LLT<Eigen::MatrixXd> llt(hinv);
        if (llt.info() != Eigen::Success) {
            throw NonSpdError("spectral check: the approximate Schur preconditioner is not positive definite");
        }
        Eigen::MatrixXd ht = llt.solve(Eigen::MatrixXd::Identity(hinv.rows(), hinv.cols()));
        ht = 0.5 * (ht + ht.transpose()).eval();
        const ExtremalEigenvalues approx = dense_generalized_eig_extremal(s, ht, dense_limit);
        report.lam_lo = approx.min;
        report.lam_hi = approx.max;
    }
    report.bound_lo = report.gamma / (2.0 * report.alpha);
    report.bound_hi = 3.0 * report.alpha * report.Gamma;
    report.pass = report.exact_pass &&
                  report.lam_lo >= report.bound_lo - slack * std::max(1.0, report.bound_lo) &&
                  report.lam_hi <= report.bound_hi + slack * std::max(1.0, report.bound_hi);
    return report;
}

void write_spectral_csv(std::ostream& out, const std::vector<SpectralReport>& reports)
{
    CsvWriter csv(out);
    csv.header({"alpha", "gamma", "Gamma", "lam_lo", "lam_hi", "bound_lo", "bound_hi", "pass"});
    for (const auto& r : reports) {
        csv.row()
            .add(r.alpha)
            .add(r.gamma)
            .add(r.Gamma)
            .add(r.lam_lo)
            .add(r.lam_hi)
            .add(r.bound_lo)
            .add(r.bound_hi)
            .add(r.pass)
            .end();
    }
}

// ---- Scaling ----------------------------------------------------------

std::vector<ScalingRow> run_scaling(const ScalingOptions& options)
{
    if (options.iterations < 1 || options.repeats < 1) {
        throw InputError("scaling: iterations and repeats must be positive");
    }
    for (const int t : options.threads) {
        if (t < 1) {
            throw InputError("scaling: thread counts must be positive");
        }
    }
    const ProblemSpec spec = make_problem(options.problem);
    const auto hierarchy = options.solver.kind == SolverKind::mg ? hierarchy_for(spec) : nullptr;
    if (options.solver.kind == SolverKind::mg && !hierarchy) {
        throw InputError("scaling: multigrid needs 1/h to be a power of two >= 4");
    }
    const TimeGlobalSystem system(spec);
    const StepPreconditioner a_tilde(spec, options.solver, hierarchy);
    const SchurPreconditioner h_tilde(spec, options.solver, hierarchy);
    UzawaConfig cfg;
    cfg.max_iter = options.iterations;
    cfg.tol = 1e-300;
    cfg.record_history = false;

    const int previous = num_threads();
    std::vector<ScalingRow> rows;
    try {
        for (const int threads : options.threads) {
            set_num_threads(threads);
            uzawa_solve(system, a_tilde, h_tilde, cfg);
            std::vector<double> wall;
            std::vector<double> fft;
            std::vector<double> spatial;
            for (int r = 0; r < options.repeats; ++r) {
                const SolveResult result = uzawa_solve(system, a_tilde, h_tilde, cfg);
                const HistoryEntry& e = result.history.last();
                wall.push_back(e.wall_seconds);
                fft.push_back(e.fft_seconds / e.wall_seconds);
                spatial.push_back(e.spatial_seconds / e.wall_seconds);
            }
            ScalingRow row;
            row.threads = threads;
            row.total_time = median(wall);
            // One preconditioned sweep per recorded iterate, including iterate 0.
            row.time_per_iter = row.total_time / (options.iterations + 1);
            row.fft_share = median(fft);
            row.spatial_share = median(spatial);
            rows.push_back(row);
        }
    } catch (...) {
        set_num_threads(previous);
        throw;
    }
    set_num_threads(previous);
    return rows;
}

void write_scaling_csv(std::ostream& out, const std::vector<ScalingRow>& rows)
{
    CsvWriter csv(out);
    csv.header({"threads", "time_per_iter", "total_time", "fft_share", "spatial_share"});
    for (const auto& r : rows) {
        csv.row().add(r.threads).add(r.time_per_iter).add(r.total_time).add(r.fft_share).add(r.spatial_share).end();
    }
}

// ---- Solve ------------------------------------------------------------

SolveReport run_solve(const SolveOptions& options)
{
    if (options.method != "uzawa" && options.method != "minres") {
        throw InputError("unknown method '" + options.method + "' (expected uzawa or minres)");
    }
    const ProblemSpec spec = make_problem(options.problem);
    const auto hierarchy = options.solver.kind == SolverKind::mg ? hierarchy_for(spec) : nullptr;
    if (options.solver.kind == SolverKind::mg && !hierarchy) {
        throw InputError("solve: multigrid needs 1/h to be a power of two >= 4");
    }
    const TimeGlobalSystem system(spec);
    const StepPreconditioner a_tilde(spec, options.solver, hierarchy);
    const SchurPreconditioner h_tilde(spec, options.solver, hierarchy);

    SolveReport report;
    SolveResult result;
    if (options.method == "uzawa") {
        if (!a_tilde.exact()) {
            report.rho_A = estimate_rho_A(a_tilde).value;
        }
        UzawaConfig cfg;
        cfg.omega = options.omega;
        cfg.tol = options.tol;
        cfg.max_iter = options.max_iter;
        result = uzawa_solve(system, a_tilde, h_tilde, cfg);
    } else {
        MinresConfig cfg;
        cfg.tol = options.tol;
        cfg.max_iter = options.max_iter;
        result = minres_solve(system, a_tilde, h_tilde, cfg);
    }
    const BlockVector euler = sequential_euler_solve(spec);
    const double scale = euler.norm();
    report.euler_difference = (result.solution.u - euler).norm() / (scale > 0.0 ? scale : 1.0);
    report.history = std::move(result.history);
    return report;
}

}  // namespace timepar
