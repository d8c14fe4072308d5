#pragma once

#include "timepar/block_vector.hpp"
#include "timepar/model_problems.hpp"

#include <memory>
#include <vector>

namespace timepar {

/// Matrix-free time-global operators of the implicit Euler scheme.
///
/// With A = Diag{tau_n A_n} and K the lower bidiagonal Kronecker factor,
/// the scheme reads B u = (K + A) u = f. The saddle form acts on [p, u] as
///     [ A   -K          ] [p]   [-f]
///     [-K^T -(K+K^T+A)  ] [u] = [-f]
/// and eliminating p gives the Schur complement S = K^T A^{-1} K + K + K^T + A.
///
/// Operators that need A_n^{-1} (P, S, s_norm, ...) are only available when
/// the system was built with diagnostics enabled; they throw
/// DiagnosticModeRequired otherwise.
class TimeGlobalSystem {
public:
    explicit TimeGlobalSystem(ProblemSpec spec, bool diagnostics = false);

    const ProblemSpec& spec() const { return spec_; }
    Index dim() const { return spec_.dim(); }
    Index steps() const { return spec_.steps(); }
    bool diagnostics() const { return !exact_.empty(); }

    /// f = [tau_1 f_1 + M u_I, tau_2 f_2, ..., tau_N f_N]
    const BlockVector& rhs() const { return rhs_; }
    BlockVector zeros() const { return BlockVector(dim(), steps()); }

    void apply_K(const BlockVector& u, BlockVector& out) const;
    void apply_Kt(const BlockVector& u, BlockVector& out) const;
    void apply_Abd(const BlockVector& u, BlockVector& out) const;
    void apply_B(const BlockVector& u, BlockVector& out) const;
    void apply_Bt(const BlockVector& u, BlockVector& out) const;
    /// (K + K^T + A) u
    void apply_sym_part(const BlockVector& u, BlockVector& out) const;
    void apply_saddle(const SaddleVector& w, SaddleVector& out) const;

    /// Block n = (tau_n A_n)^{-1} u_n. Diagnostic mode only.
    void apply_Abd_inv(const BlockVector& u, BlockVector& out) const;
    /// P u = A^{-1} K u + u
    void apply_P(const BlockVector& u, BlockVector& out) const;
    /// P^T u = K^T A^{-1} u + u
    void apply_Pt(const BlockVector& u, BlockVector& out) const;
    void apply_S(const BlockVector& u, BlockVector& out) const;

    BlockVector apply_K(const BlockVector& u) const;
    BlockVector apply_Kt(const BlockVector& u) const;
    BlockVector apply_Abd(const BlockVector& u) const;
    BlockVector apply_B(const BlockVector& u) const;
    BlockVector apply_Bt(const BlockVector& u) const;
    SaddleVector apply_saddle(const SaddleVector& w) const;
    BlockVector apply_Abd_inv(const BlockVector& u) const;
    BlockVector apply_P(const BlockVector& u) const;
    BlockVector apply_Pt(const BlockVector& u) const;
    BlockVector apply_S(const BlockVector& u) const;

    /// ||u||_A^2 = sum_n tau_n |u_n|_{A_n}^2
    double a_norm(const BlockVector& u) const;
    /// Closed-form S-norm built from the jumps d_n = u_n - u_{n-1} (u_0 = 0):
    /// sum_n [d_n' M (tau_n A_n)^{-1} M d_n + tau_n |u_n|_{A_n}^2] + |u_N|_M^2 + sum_n |d_n|_M^2
    double s_norm(const BlockVector& u) const;
    /// max_n |u_n|_M
    double max_m_norm(const BlockVector& u) const;
    /// j(u, v) = (u_N, v_N)_M + sum_n (d_n(u), d_n(v))_M
    double jump_form(const BlockVector& u, const BlockVector& v) const;
    /// Sum of the time-derivative and A_n terms of s(u, v), without j(u, v).
    double s_volume_form(const BlockVector& u, const BlockVector& v) const;
    /// s_D(u, v): volume form with the A_N term weighted by 1/2.
    double s_D(const BlockVector& u, const BlockVector& v) const;

private:
    struct ExactFactor {
        const SpatialMatrix* base;
        CholeskyFactor factor;
    };

    void require_diagnostics(const char* where) const;
    void require_shape(const BlockVector& u, const char* where) const;
    const CholeskyFactor& factor_for(Index n) const { return exact_[step_factor_[static_cast<std::size_t>(n)]].factor; }
    /// tau_n * scale_n
    double step_weight(Index n) const;

    ProblemSpec spec_;
    BlockVector rhs_;
    std::vector<ExactFactor> exact_;
    std::vector<std::size_t> step_factor_;
};

}  // namespace timepar
