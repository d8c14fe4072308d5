#include "timepar/spatial_solvers.hpp"

#include "timepar/eigen_extremal.hpp"
#include "timepar/errors.hpp"
#include "timepar/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace timepar {

void SpatialSolver::apply_forward(ConstVectorRef x, VectorRef y) const
{
    // Conjugate gradients on W^{-1} y = x.
    const Index n = dim();
    y.setZero();
    SpatialVector r = x;
    SpatialVector p = r;
    SpatialVector q(n);
    double rr = r.squaredNorm();
    const double target = 1e-28 * rr;
    for (Index it = 0; it < 10 * n + 100 && rr > target; ++it) {
        apply_inverse(p, q);
        const double pq = p.dot(q);
        if (!(pq > 0.0)) {
            throw NonSpdError("SpatialSolver::apply_forward: preconditioner is not positive definite");
        }
        const double step = rr / pq;
        y += step * p;
        r -= step * q;
        const double rr_new = r.squaredNorm();
        p = r + (rr_new / rr) * p;
        rr = rr_new;
    }
}

SpatialVector SpatialSolver::apply_inverse(const SpatialVector& b) const
{
    if (b.size() != dim()) {
        throw DimensionError("SpatialSolver::apply_inverse: dimension mismatch");
    }
    SpatialVector x(dim());
    apply_inverse(b, x);
    return x;
}

SpatialVector SpatialSolver::apply_forward(const SpatialVector& x) const
{
    if (x.size() != dim()) {
        throw DimensionError("SpatialSolver::apply_forward: dimension mismatch");
    }
    SpatialVector y(dim());
    apply_forward(x, y);
    return y;
}

DirectSolver::DirectSolver(SpatialMatrix target) : target_(std::move(target)), factor_(target_) {}

void DirectSolver::apply_inverse(ConstVectorRef b, VectorRef x) const
{
    factor_.solve(b, x);
}

void DirectSolver::apply_forward(ConstVectorRef x, VectorRef y) const
{
    target_.multiply(x, y);
}

JacobiSolver::JacobiSolver(SpatialMatrix target, int sweeps, double damping)
    : target_(std::move(target)), sweeps_(sweeps), damping_(damping)
{
    if (sweeps < 1) {
        throw InputError("JacobiSolver: sweeps must be >= 1");
    }
    if (!(damping > 0.0)) {
        throw InputError("JacobiSolver: damping must be positive");
    }
    const SpatialVector diag = target_.diagonal_entries();
    if ((diag.array() <= 0.0).any()) {
        throw NonSpdError("JacobiSolver: non-positive diagonal entry");
    }
    inv_diag_ = diag.cwiseInverse();
}

void JacobiSolver::apply_inverse(ConstVectorRef b, VectorRef x) const
{
    x = damping_ * inv_diag_.cwiseProduct(b);
    SpatialVector lx(dim());
    for (int s = 1; s < sweeps_; ++s) {
        target_.multiply(x, lx);
        x += damping_ * inv_diag_.cwiseProduct(b - lx);
    }
}

std::string JacobiSolver::describe() const
{
    std::ostringstream os;
    os << "jacobi(" << sweeps_ << ", " << damping_ << ")";
    return os.str();
}

double default_damping(SpaceDim space)
{
    return space == SpaceDim::two ? 0.8 : 2.0 / 3.0;
}

SolverConfig parse_solver_config(const std::string& text)
{
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    int count = 1;
    if (colon != std::string::npos) {
        const std::string arg = text.substr(colon + 1);
        std::size_t used = 0;
        try {
            count = std::stoi(arg, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != arg.size() || count < 1) {
            throw InputError("solver '" + text + "': count after ':' must be a positive integer");
        }
    }
    SolverConfig config;
    if (name == "direct" && colon == std::string::npos) {
        config.kind = SolverKind::direct;
    } else if (name == "jacobi") {
        config.kind = SolverKind::jacobi;
        config.sweeps = count;
    } else if (name == "mg") {
        config.kind = SolverKind::mg;
        config.vcycles = count;
    } else {
        throw InputError("unknown solver '" + text + "' (expected direct, jacobi[:sweeps] or mg[:vcycles])");
    }
    return config;
}

std::string to_string(const SolverConfig& config)
{
    switch (config.kind) {
    case SolverKind::direct:
        return "direct";
    case SolverKind::jacobi:
        return "jacobi:" + std::to_string(config.sweeps);
    case SolverKind::mg:
        return "mg:" + std::to_string(config.vcycles);
    }
    return "unknown";
}

std::unique_ptr<SpatialSolver> make_spatial_solver(const SpatialMatrix& target, const SolverConfig& config,
                                                   std::shared_ptr<const MgHierarchy> hierarchy)
{
    switch (config.kind) {
    case SolverKind::direct:
        return std::make_unique<DirectSolver>(target);
    case SolverKind::jacobi: {
        const double damping =
            config.damping > 0.0 ? config.damping
                                 : default_damping(hierarchy ? hierarchy->space() : SpaceDim::one);
        return std::make_unique<JacobiSolver>(target, config.sweeps, damping);
    }
    case SolverKind::mg: {
        if (!hierarchy) {
            throw InputError("make_spatial_solver: the mg solver needs a structured mesh hierarchy");
        }
        if (hierarchy->dim(0) != target.dim()) {
            throw DimensionError("make_spatial_solver: hierarchy does not match the operator dimension");
        }
        auto stack = std::make_shared<const std::vector<SpatialMatrix>>(hierarchy->galerkin_levels(target));
        MgOptions options;
        options.vcycles = config.vcycles;
        options.smoothing = config.smoothing;
        options.damping = config.damping;
        return std::make_unique<MgVcycleSolver>(std::move(hierarchy),
                                                std::vector<std::pair<double, LevelStack>>{{1.0, stack}}, options);
    }
    }
    throw InputError("make_spatial_solver: unknown solver kind");
}

StepPreconditioner::StepPreconditioner(const ProblemSpec& spec, const SolverConfig& config,
                                       std::shared_ptr<const MgHierarchy> hierarchy)
    : config_(config)
{
    spec.validate();
    for (int n = 0; n < spec.steps(); ++n) {
        const auto& op = spec.stiffness[static_cast<std::size_t>(n)];
        auto it = std::find_if(bases_.begin(), bases_.end(), [&](const auto& b) { return b.first == op.base; });
        if (it == bases_.end()) {
            bases_.emplace_back(op.base, make_spatial_solver(*op.base, config, hierarchy));
            it = bases_.end() - 1;
        }
        step_base_.push_back(static_cast<std::size_t>(it - bases_.begin()));
        weights_.push_back(spec.grid.step(n) * op.scale);
    }
}

bool StepPreconditioner::exact() const
{
    return config_.kind == SolverKind::direct;
}

void StepPreconditioner::apply_inverse(const BlockVector& r, BlockVector& out) const
{
    if (r.steps() != static_cast<Index>(weights_.size())) {
        throw DimensionError("StepPreconditioner: block count mismatch");
    }
    out = BlockVector(r.dim(), r.steps());
    parallel_for(r.steps(), [&](std::ptrdiff_t n) {
        const auto i = static_cast<std::size_t>(n);
        bases_[step_base_[i]].second->apply_inverse(r.block(n), out.block(n));
        out.block(n) /= weights_[i];
    });
}

void StepPreconditioner::apply_forward(const BlockVector& p, BlockVector& out) const
{
    if (p.steps() != static_cast<Index>(weights_.size())) {
        throw DimensionError("StepPreconditioner: block count mismatch");
    }
    out = BlockVector(p.dim(), p.steps());
    parallel_for(p.steps(), [&](std::ptrdiff_t n) {
        const auto i = static_cast<std::size_t>(n);
        bases_[step_base_[i]].second->apply_forward(p.block(n), out.block(n));
        out.block(n) *= weights_[i];
    });
}

namespace {

BlockVector as_block(const SpatialVector& v)
{
    BlockVector b(v.size(), 1);
    b.block(0) = v;
    return b;
}

}  // namespace

RhoEstimate estimate_rho_A(const SpatialMatrix& target, const SpatialSolver& solver, int iterations,
                           std::uint64_t seed)
{
    if (solver.dim() != target.dim()) {
        throw DimensionError("estimate_rho_A: solver and operator dimensions differ");
    }
    if (iterations < 1) {
        throw InputError("estimate_rho_A: iterations must be >= 1");
    }
    const Index n = target.dim();
    // E = I - W^{-1} L is self-adjoint in the L inner product, so a Lanczos
    // run in that inner product (a Krylov-accelerated power iteration) gives
    // Ritz values inside the spectrum of E.
    BlockOperator error_op = [&](const BlockVector& in, BlockVector& out) {
        SpatialVector lx(n);
        SpatialVector wlx(n);
        target.multiply(in.block(0), lx);
        solver.apply_inverse(lx, wlx);
        out = in;
        out.block(0) -= wlx;
    };
    BlockOperator inner = [&](const BlockVector& in, BlockVector& out) {
        out = BlockVector(n, 1);
        target.multiply(in.block(0), out.block(0));
    };
    std::mt19937_64 rng(seed);
    LanczosOptions options;
    options.max_iterations = static_cast<int>(std::min<Index>(iterations, n));
    options.tolerance = 1e-10;
    const LanczosResult res = lanczos_extremal_eig(error_op, inner, BlockVector::random(n, 1, rng), options);
    RhoEstimate est;
    est.value = std::max(std::abs(res.min), std::abs(res.max));
    if (est.value < 1e-14) {
        est.value = 0.0;
    }
    est.iterations = res.iterations;
    est.convergent = est.value < 1.0;
    return est;
}

RhoEstimate estimate_rho_A(const StepPreconditioner& pc, int iterations, std::uint64_t seed)
{
    RhoEstimate worst;
    for (std::size_t i = 0; i < pc.distinct_bases(); ++i) {
        const RhoEstimate est = estimate_rho_A(pc.base(i), pc.base_solver(i), iterations, seed);
        if (est.value >= worst.value) {
            worst = est;
        }
    }
    worst.convergent = worst.value < 1.0;
    return worst;
}

GammaEstimate estimate_gamma_Gamma(const SpatialMatrix& h, const SpatialSolver& solver, const SpatialMatrix& a,
                                   Index dense_cutoff, int lanczos_iterations)
{
    const Index n = h.dim();
    if (solver.dim() != n || a.dim() != n) {
        throw DimensionError("estimate_gamma_Gamma: dimensions differ");
    }
    GammaEstimate est;
    if (n <= dense_cutoff) {
        // X v = lambda Y v  <=>  (W A W) z = lambda (H^{-1} A H^{-1}) z with z = X v.
        Eigen::MatrixXd w(n, n);
        for (Index j = 0; j < n; ++j) {
            w.col(j) = solver.apply_inverse(SpatialVector(SpatialVector::Unit(n, j)));
        }
        w = 0.5 * (w + w.transpose()).eval();
        const Eigen::MatrixXd ad = a.to_dense();
        const Eigen::MatrixXd hinv = Eigen::LLT<Eigen::MatrixXd>(h.to_dense()).solve(Eigen::MatrixXd::Identity(n, n));
        Eigen::MatrixXd lhs = w * ad * w;
        Eigen::MatrixXd rhs = hinv * ad * hinv;
        lhs = 0.5 * (lhs + lhs.transpose()).eval();
        rhs = 0.5 * (rhs + rhs.transpose()).eval();
        const ExtremalEigenvalues ev = dense_generalized_eig_extremal(lhs, rhs);
        est.gamma = ev.min;
        est.Gamma = ev.max;
        est.dense = true;
        return est;
    }

    const CholeskyFactor a_factor(a);
    auto apply_x = [&](ConstVectorRef v, VectorRef out) {
        SpatialVector hv(n);
        h.multiply(v, hv);
        const SpatialVector t = a_factor.solve(hv);
        h.multiply(t, out);
    };
    BlockOperator op = [&](const BlockVector& in, BlockVector& out) {
        SpatialVector xv(n);
        SpatialVector t(n);
        SpatialVector at(n);
        apply_x(in.block(0), xv);
        solver.apply_inverse(xv, t);
        a.multiply(t, at);
        out = BlockVector(n, 1);
        solver.apply_inverse(at, out.block(0));
    };
    BlockOperator inner = [&](const BlockVector& in, BlockVector& out) {
        out = BlockVector(n, 1);
        apply_x(in.block(0), out.block(0));
    };
    std::mt19937_64 rng(0);
    LanczosOptions options;
    options.max_iterations = static_cast<int>(std::min<Index>(lanczos_iterations, n));
    options.tolerance = 1e-8;
    const LanczosResult res = lanczos_extremal_eig(op, inner, as_block(BlockVector::random(n, 1, rng).block(0)), options);
    est.gamma = res.min;
    est.Gamma = res.max;
    est.dense = false;
    return est;
}

}  // namespace timepar
