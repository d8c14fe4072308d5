#pragma once

#include "timepar/block_vector.hpp"
#include "timepar/model_problems.hpp"
#include "timepar/sparse.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace timepar {

/// Fixed linear SPD approximate inverse W^{-1} of a spatial operator.
///
/// apply_inverse is one application of the preconditioner, never a
/// tolerance-driven iteration, so the map b -> W^{-1} b is exactly linear.
class SpatialSolver {
public:
    virtual ~SpatialSolver() = default;

    virtual Index dim() const = 0;
    /// x = W^{-1} b
    virtual void apply_inverse(ConstVectorRef b, VectorRef x) const = 0;
    /// y = W x. Iterative kinds invert apply_inverse by conjugate gradients,
    /// which is only meant for diagnostics.
    virtual void apply_forward(ConstVectorRef x, VectorRef y) const;
    virtual bool exact() const { return false; }
    virtual std::string describe() const = 0;

    SpatialVector apply_inverse(const SpatialVector& b) const;
    SpatialVector apply_forward(const SpatialVector& x) const;
};

class DirectSolver final : public SpatialSolver {
public:
    using SpatialSolver::apply_forward;
    using SpatialSolver::apply_inverse;

    explicit DirectSolver(SpatialMatrix target);

    Index dim() const override { return target_.dim(); }
    void apply_inverse(ConstVectorRef b, VectorRef x) const override;
    void apply_forward(ConstVectorRef x, VectorRef y) const override;
    bool exact() const override { return true; }
    std::string describe() const override { return "direct"; }

private:
    SpatialMatrix target_;
    CholeskyFactor factor_;
};

/// `sweeps` damped Jacobi steps started from zero.
class JacobiSolver final : public SpatialSolver {
public:
    using SpatialSolver::apply_forward;
    using SpatialSolver::apply_inverse;

    JacobiSolver(SpatialMatrix target, int sweeps, double damping);

    Index dim() const override { return target_.dim(); }
    void apply_inverse(ConstVectorRef b, VectorRef x) const override;
    std::string describe() const override;

private:
    SpatialMatrix target_;
    SpatialVector inv_diag_;
    int sweeps_;
    double damping_;
};

/// Nested geometric hierarchy on a structured mesh: factor-2 coarsening,
/// linear interpolation, Galerkin coarse operators.
///
/// Level 0 is the finest. prolongation(l) maps level l+1 to level l.
class MgHierarchy {
public:
    MgHierarchy(SpaceDim space, int fine_cells);

    SpaceDim space() const { return space_; }
    int levels() const { return static_cast<int>(cells_.size()); }
    int cells(int level) const { return cells_[static_cast<std::size_t>(level)]; }
    Index dim(int level) const;
    const Eigen::SparseMatrix<double>& prolongation(int level) const
    {
        return prolongations_[static_cast<std::size_t>(level)];
    }

    /// fine, P_0^T fine P_0, ... down to the coarsest level.
    std::vector<SpatialMatrix> galerkin_levels(const SpatialMatrix& fine) const;

    /// Galerkin level stacks of the assembled mass and stiffness matrices.
    const std::vector<SpatialMatrix>& mass_levels() const { return mass_; }
    const std::vector<SpatialMatrix>& stiffness_levels() const { return stiffness_; }

private:
    SpaceDim space_;
    std::vector<int> cells_;
    std::vector<Eigen::SparseMatrix<double>> prolongations_;
    std::vector<SpatialMatrix> mass_;
    std::vector<SpatialMatrix> stiffness_;
};

/// fine_cells must be a power of two >= 4. The coarsest level has 2 cells per
/// side (a single unknown) and is solved directly.
std::shared_ptr<const MgHierarchy> build_mg_hierarchy(SpaceDim space, int fine_cells);

struct MgOptions {
    int vcycles = 1;
    int smoothing = 2;  ///< Jacobi sweeps before and after the coarse correction
    double damping = 0.0;  ///< 0 selects 2/3 (1D) or 4/5 (2D)
};

/// Stack of operators, one per level, shared between solvers.
using LevelStack = std::shared_ptr<const std::vector<SpatialMatrix>>;

/// Symmetric V-cycle for L = sum_i c_i T_i, where every T_i is given on all
/// levels. Only the combined Jacobi diagonals and the tiny coarse factor are
/// stored per solver, so blends of the same hierarchy stay cheap.
class MgVcycleSolver final : public SpatialSolver {
public:
    using SpatialSolver::apply_forward;
    using SpatialSolver::apply_inverse;

    MgVcycleSolver(std::shared_ptr<const MgHierarchy> hierarchy, std::vector<std::pair<double, LevelStack>> terms,
                   const MgOptions& options);

    Index dim() const override { return hierarchy_->dim(0); }
    void apply_inverse(ConstVectorRef b, VectorRef x) const override;
    std::string describe() const override;

private:
    void multiply(int level, ConstVectorRef in, VectorRef out) const;
    void vcycle(int level, ConstVectorRef b, VectorRef x) const;

    std::shared_ptr<const MgHierarchy> hierarchy_;
    std::vector<std::pair<double, LevelStack>> terms_;
    MgOptions options_;
    double damping_;
    std::vector<SpatialVector> inv_diag_;
    Eigen::LLT<Eigen::MatrixXd> coarse_;
};

enum class SolverKind { direct, jacobi, mg };

struct SolverConfig {
    SolverKind kind = SolverKind::direct;
    int sweeps = 1;      ///< jacobi sweeps
    double damping = 0.0;  ///< 0 selects the per-dimension default
    int vcycles = 1;     ///< mg cycles per application
    int smoothing = 2;   ///< mg pre/post Jacobi sweeps
};

/// Accepts "direct", "jacobi", "jacobi:<sweeps>", "mg", "mg:<vcycles>".
SolverConfig parse_solver_config(const std::string& text);
std::string to_string(const SolverConfig& config);

/// Default Jacobi damping: 2/3 in 1D, 4/5 in 2D.
double default_damping(SpaceDim space);

/// Solver for `target` of the requested kind. The MG kind needs a hierarchy
/// whose finest level matches target; its Galerkin levels are built here.
std::unique_ptr<SpatialSolver> make_spatial_solver(const SpatialMatrix& target, const SolverConfig& config,
                                                   std::shared_ptr<const MgHierarchy> hierarchy = nullptr);

/// Ã = Diag{tau_n A~_n}: one solver per distinct stiffness base, with
/// A~_n^{-1} = W_base^{-1} / (tau_n scale_n).
class StepPreconditioner {
public:
    StepPreconditioner(const ProblemSpec& spec, const SolverConfig& config,
                       std::shared_ptr<const MgHierarchy> hierarchy = nullptr);

    const SolverConfig& config() const { return config_; }
    bool exact() const;
    /// out = Ã^{-1} r
    void apply_inverse(const BlockVector& r, BlockVector& out) const;
    /// out = Ã p (CG-inverted for iterative kinds; diagnostics only)
    void apply_forward(const BlockVector& p, BlockVector& out) const;

    /// Distinct (base matrix, solver) pairs.
    std::size_t distinct_bases() const { return bases_.size(); }
    const SpatialMatrix& base(std::size_t i) const { return *bases_[i].first; }
    const SpatialSolver& base_solver(std::size_t i) const { return *bases_[i].second; }

private:
    SolverConfig config_;
    std::vector<std::pair<std::shared_ptr<const SpatialMatrix>, std::unique_ptr<SpatialSolver>>> bases_;
    std::vector<std::size_t> step_base_;
    std::vector<double> weights_;
};

struct RhoEstimate {
    double value = 0.0;
    int iterations = 0;
    /// value < 1: the preconditioner is provably convergent.
    bool convergent = true;
};

/// Power iteration for ||I - W^{-1} L||_L. Every iterate gives a lower bound
/// of the true norm; the largest one is returned.
RhoEstimate estimate_rho_A(const SpatialMatrix& target, const SpatialSolver& solver, int iterations = 100,
                           std::uint64_t seed = 0);

/// Largest estimate over the distinct bases of a StepPreconditioner.
RhoEstimate estimate_rho_A(const StepPreconditioner& pc, int iterations = 100, std::uint64_t seed = 0);

struct GammaEstimate {
    double gamma = 1.0;
    double Gamma = 1.0;
    bool dense = true;
};

/// Extremal eigenvalues of X v = lambda Y v with X = H A^{-1} H and
/// Y = H~ A^{-1} H~, where H~^{-1} is the solver. Dense for dim <= dense_cutoff,
/// Lanczos (in the X inner product) above.
GammaEstimate estimate_gamma_Gamma(const SpatialMatrix& h, const SpatialSolver& solver, const SpatialMatrix& a,
                                   Index dense_cutoff = 500, int lanczos_iterations = 200);

}  // namespace timepar
