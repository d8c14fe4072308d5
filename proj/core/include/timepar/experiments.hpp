#pragma once

#include "timepar/iterative_solvers.hpp"
#include "timepar/model_problems.hpp"
#include "timepar/spatial_solvers.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace timepar {

enum class CoefficientProfile {
    constant,  ///< c = 1
    step,      ///< c = 2 on (0, T/2], 1 afterwards
    smooth,    ///< c = 1 + 0.5 sin(2 pi t / T)
};

CoefficientProfile parse_coefficient_profile(const std::string& text);
std::string to_string(CoefficientProfile profile);
Coefficient make_coefficient(CoefficientProfile profile, double final_time);

struct ProblemConfig {
    SpaceDim space = SpaceDim::one;
    double h = 0.125;
    int steps = 16;
    double final_time = 1.0;
    CoefficientProfile coefficient = CoefficientProfile::constant;
    GridKind grid = GridKind::uniform;
    double perturbation = 0.0;
    DataKind data = DataKind::sine_initial;
    std::uint64_t seed = 0;
};

/// Cells per side for mesh size h; throws unless 1/h is an integer >= 2.
int cells_from_h(double h);
ProblemSpec make_problem(const ProblemConfig& config);
/// Hierarchy for the problem's mesh, or nullptr when the mesh is not a power
/// of two (or absent).
std::shared_ptr<const MgHierarchy> hierarchy_for(const ProblemSpec& spec);

// ---- Table 1: extremal eigenvalues of H^{-1} S -------------------------

struct Table1Options {
    /// Cells with dim * N above this use Lanczos.
    Index dense_limit = 20000;
    int lanczos_iterations = 400;
    double lanczos_tol = 1e-7;
};

struct Table1Row {
    double h = 0.0;
    int steps = 0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double kappa = 0.0;
    bool lanczos = false;
    int iterations = 0;
    double seconds = 0.0;
};

/// 1D heat equation on (0,1), T = 1, uniform steps, exact solvers.
///
/// Dense cells are computed exactly through the generalized eigenbasis of
/// (A, M): in that basis S and H decouple into one N x N pencil per spatial
/// mode, each solved densely. Larger cells run Lanczos on H^{-1} S in the H
/// inner product.
Table1Row table1_cell(double h, int steps, const Table1Options& options = {});
std::vector<Table1Row> run_table1(const std::vector<double>& h_list, const std::vector<int>& n_list,
                                  const Table1Options& options = {});
void write_table1_csv(std::ostream& out, const std::vector<Table1Row>& rows);

// ---- Table 2: Uzawa iteration counts ----------------------------------

struct Table2Options {
    int vcycles = 1;
    double omega = 0.9;
    double tol = 1e-6;
    int max_iter = 200;
};

struct Table2Row {
    double h = 0.0;
    int steps = 0;
    int iterations = 0;
    bool converged = false;
    double seconds = 0.0;
};

/// 2D heat equation on the unit square, u(0) = sin(pi x) sin(pi y), no
/// forcing, MG spatial solvers, stopped on the exact s-norm error.
Table2Row table2_cell(double h, int steps, const Table2Options& options = {});
std::vector<Table2Row> run_table2(const std::vector<double>& h_list, const std::vector<int>& n_list,
                                  const Table2Options& options = {});
void write_table2_csv(std::ostream& out, const std::vector<Table2Row>& rows);

// ---- Convergence histories for several spatial solvers ----------------

struct HistoryOptions {
    ProblemConfig problem{SpaceDim::two, 1.0 / 64.0, 512};
    std::vector<SolverConfig> solvers;
    double omega = 0.9;
    double tol = 1e-6;
    int max_iter = 60;
};

std::vector<ConvergenceHistory> run_history(const HistoryOptions& options);
/// Columns iter,solver,s_norm_error,residual.
void write_history_csv(std::ostream& out, const std::vector<ConvergenceHistory>& histories);

// ---- Spectral bounds --------------------------------------------------

struct SpectralReport {
    double alpha = 1.0;
    double gamma = 1.0;
    double Gamma = 1.0;
    /// Extremal eigenvalues of (S, H~).
    double lam_lo = 0.0;
    double lam_hi = 0.0;
    double bound_lo = 0.0;
    double bound_hi = 0.0;
    bool pass = false;
    /// Extremal eigenvalues of (S, H) with exact solvers, against [1/(2 alpha), 3 alpha].
    double exact_lo = 0.0;
    double exact_hi = 0.0;
    bool exact_pass = false;
};

/// Dense verification of 1/(2 alpha) H <= S <= 3 alpha H and of the
/// approximate-solver bounds [gamma/(2 alpha), 3 alpha Gamma]. Requires
/// dim * N <= dense_limit.
SpectralReport run_spectral_check(const ProblemSpec& spec, const SolverConfig& solver, double slack = 1e-8,
                                  Index dense_limit = 3000);
void write_spectral_csv(std::ostream& out, const std::vector<SpectralReport>& reports);

// ---- Thread scaling ---------------------------------------------------

struct ScalingOptions {
    ProblemConfig problem{SpaceDim::one, 1.0 / 128.0, 1024};
    SolverConfig solver{SolverKind::mg};
    std::vector<int> threads{1, 2, 4, 8};
    int iterations = 10;
    int repeats = 5;
};

struct ScalingRow {
    int threads = 1;
    double time_per_iter = 0.0;
    double total_time = 0.0;
    double fft_share = 0.0;
    double spatial_share = 0.0;
};

/// Fixed-iteration Uzawa runs; each row is the median of `repeats` runs after
/// one warm-up. Restores the previous thread count on exit.
std::vector<ScalingRow> run_scaling(const ScalingOptions& options);
void write_scaling_csv(std::ostream& out, const std::vector<ScalingRow>& rows);

// ---- Single solve -----------------------------------------------------

struct SolveOptions {
    ProblemConfig problem;
    SolverConfig solver;
    std::string method = "uzawa";  ///< uzawa | minres
    double omega = 0.9;
    double tol = 1e-6;
    int max_iter = 500;
};

struct SolveReport {
    ConvergenceHistory history;
    /// |u - u_euler| / |u_euler| (Euclidean).
    double euler_difference = 0.0;
    double rho_A = 0.0;
};

SolveReport run_solve(const SolveOptions& options);

}  // namespace timepar
