#pragma once

#include "timepar/convergence_history.hpp"
#include "timepar/schur_preconditioner.hpp"
#include "timepar/spatial_solvers.hpp"
#include "timepar/time_operators.hpp"

#include <optional>

namespace timepar {

enum class StoppingRule {
    /// sqrt(r_p' Ã^{-1} r_p + r_u' H~^{-1} r_u) relative to the same norm of g = [-f, -f]
    preconditioned_residual,
    /// |u* - u_j|_S <= tol |u*|_S against a reference solution (diagnostic mode)
    s_norm_error,
};

struct UzawaConfig {
    double omega = 0.9;
    int max_iter = 500;
    double tol = 1e-6;
    StoppingRule stopping = StoppingRule::preconditioned_residual;
    bool record_history = true;
    /// Abort once the monitored quantity exceeds this multiple of its initial value.
    double divergence_factor = 1e6;
    /// Record the D-norm error; needs a reference solution and rho_A.
    bool record_d_norm = false;
    double rho_A = 0.0;

    void validate() const;
};

struct SolveResult {
    SaddleVector solution;
    ConvergenceHistory history;
};

/// Optional exact solution u* (p* = -u*) used for error monitoring.
struct Reference {
    const BlockVector* u = nullptr;
};

/// Inexact Uzawa iteration
///     p_{j+1} = p_j + Ã^{-1} (K u_j - A p_j - f)
///     u_{j+1} = u_j + omega H~^{-1} (f - K^T p_{j+1} - (K + K^T + A) u_j)
/// from a zero initial guess unless `initial` is given.
///
/// Errors in the s-norm are recorded whenever a reference is given and the
/// system has diagnostics enabled. Throws DivergenceError on blow-up.
SolveResult uzawa_solve(const TimeGlobalSystem& system, const StepPreconditioner& a_tilde,
                        const SchurPreconditioner& h_tilde, const UzawaConfig& config, Reference reference = {},
                        const SaddleVector* initial = nullptr);

struct RateReport {
    double rho_A = 0.0;
    double omega = 0.0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double sigma_minus = 0.0;
    double sigma_plus = 0.0;
    double rho_U = 0.0;
    /// omega lambda_max < 2 (1 - rho_A) / (1 + rho_A)
    bool damping_ok = false;
};

/// Proven contraction factor of the inexact Uzawa method in the D-norm.
RateReport compute_rate_report(double rho_A, double omega, double lambda_min, double lambda_max);

/// ||w||_D^2 = omega rho_A |p|_Ã^2 + |u|_H~^2.
double d_norm(const SaddleVector& w, double omega, double rho_A, const StepPreconditioner& a_tilde,
              const SchurPreconditioner& h_tilde);

struct MinresConfig {
    int max_iter = 500;
    double tol = 1e-6;
    StoppingRule stopping = StoppingRule::preconditioned_residual;
    bool record_history = true;
};

/// Preconditioned MINRES on the saddle operator with the block-diagonal
/// preconditioner diag(Ã, H~). The recorded residual is the preconditioned
/// residual norm, which is non-increasing.
SolveResult minres_solve(const TimeGlobalSystem& system, const StepPreconditioner& a_tilde,
                         const SchurPreconditioner& h_tilde, const MinresConfig& config, Reference reference = {});

/// Forward implicit Euler sweep (M + tau_n A_n) u_n = M u_{n-1} + tau_n f_n
/// with exact factorizations.
BlockVector sequential_euler_solve(const ProblemSpec& spec);

}  // namespace timepar
