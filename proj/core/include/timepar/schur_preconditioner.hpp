#pragma once

#include "timepar/dst.hpp"
#include "timepar/model_problems.hpp"
#include "timepar/spatial_solvers.hpp"

#include <memory>
#include <vector>

namespace timepar {

/// Wall-clock split of one preconditioner application.
struct ApplyTimings {
    double fft_seconds = 0.0;
    double spatial_seconds = 0.0;
};

/// Schur complement preconditioner H = Phi^T Ĥ Phi with
///     Ĥ = (N / 2 tau) Diag{ H_k A^{-1} H_k },   H_k = mu_k M + tau A,
/// built from the reference pair (tau, A) of a ProblemSpec. The approximate
/// variant replaces every H_k^{-1} by a spatial solver; with direct solvers
/// it is H itself.
class SchurPreconditioner {
public:
    SchurPreconditioner(const ProblemSpec& spec, const SolverConfig& config,
                        std::shared_ptr<const MgHierarchy> hierarchy = nullptr,
                        DstPath path = DstPath::automatic);

    Index steps() const { return plan_.length(); }
    Index dim() const { return mass_.dim(); }
    double tau() const { return tau_; }
    bool exact() const { return config_.kind == SolverKind::direct; }
    const SolverConfig& config() const { return config_; }
    const DstPlan& plan() const { return plan_; }
    /// mu_k, k = 1..N stored zero-based.
    const Eigen::VectorXd& mu() const { return mu_; }
    /// The reference operator A (scale already applied).
    const SpatialMatrix& reference() const { return a_ref_; }

    /// H_k = mu_k M + tau A, assembled on request.
    SpatialMatrix Hk(Index k) const;
    const SpatialSolver& solver(Index k) const { return *solvers_[static_cast<std::size_t>(k)]; }

    /// out = Phi^{-1} Diag{(2 tau / N) W_k A W_k} Phi^{-T} r, W_k = H~_k^{-1}.
    void apply_Hinv(const BlockVector& r, BlockVector& out, ApplyTimings* timings = nullptr) const;
    BlockVector apply_Hinv(const BlockVector& r) const;

    /// out = H u. Needs direct solvers (throws DiagnosticModeRequired otherwise).
    void apply_H(const BlockVector& u, BlockVector& out) const;
    BlockVector apply_H(const BlockVector& u) const;

    /// out = H~ u, inverting each solver by CG. Diagnostics only.
    void apply_Htilde(const BlockVector& u, BlockVector& out) const;

private:
    void require_shape(const BlockVector& u, const char* where) const;
    /// Ĥ-type block: scale * G A^{-1} G u where G applies H_k or H~_k.
    template <typename ApplyG>
    void apply_hat_blocks(const BlockVector& in, BlockVector& out, ApplyG&& g) const;

    SolverConfig config_;
    SpatialMatrix mass_;
    SpatialMatrix a_ref_;
    double tau_;
    Eigen::VectorXd mu_;
    DstPlan plan_;
    std::vector<std::unique_ptr<SpatialSolver>> solvers_;
    std::unique_ptr<CholeskyFactor> a_ref_factor_;
};

}  // namespace timepar
