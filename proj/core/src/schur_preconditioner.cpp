#include "timepar/schur_preconditioner.hpp"

#include "timepar/errors.hpp"
#include "timepar/parallel.hpp"

#include <chrono>
#include <string>

namespace timepar {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

SchurPreconditioner::SchurPreconditioner(const ProblemSpec& spec, const SolverConfig& config,
                                         std::shared_ptr<const MgHierarchy> hierarchy, DstPath path)
    : config_(config),
      mass_(spec.mass),
      a_ref_(spec.reference.materialize()),
      tau_(spec.tau_ref),
      mu_(dst_frequencies(spec.steps())),
      plan_(spec.steps(), path)
{
    spec.validate();
    const Index n_steps = spec.steps();
    solvers_.resize(static_cast<std::size_t>(n_steps));

    if (config.kind == SolverKind::mg) {
        if (!hierarchy) {
            throw InputError("SchurPreconditioner: the mg solver needs a structured mesh hierarchy");
        }
        auto mass_stack = std::make_shared<const std::vector<SpatialMatrix>>(hierarchy->galerkin_levels(mass_));
        auto ref_stack = std::make_shared<const std::vector<SpatialMatrix>>(hierarchy->galerkin_levels(a_ref_));
        MgOptions options;
        options.vcycles = config.vcycles;
        options.smoothing = config.smoothing;
        options.damping = config.damping;
        for (Index k = 0; k < n_steps; ++k) {
            solvers_[static_cast<std::size_t>(k)] = std::make_unique<MgVcycleSolver>(
                hierarchy, std::vector<std::pair<double, LevelStack>>{{mu_[k], mass_stack}, {tau_, ref_stack}},
                options);
        }
    } else {
        parallel_for(n_steps, [&](std::ptrdiff_t k) {
            solvers_[static_cast<std::size_t>(k)] = make_spatial_solver(Hk(k), config, hierarchy);
        });
    }
    if (exact()) {
        a_ref_factor_ = std::make_unique<CholeskyFactor>(a_ref_);
    }
}

SpatialMatrix SchurPreconditioner::Hk(Index k) const
{
    if (k < 0 || k >= steps()) {
        throw InputError("SchurPreconditioner::Hk: index out of range");
    }
    return SpatialMatrix::combine(mu_[k], mass_, tau_, a_ref_);
}

void SchurPreconditioner::require_shape(const BlockVector& u, const char* where) const
{
    if (u.dim() != dim() || u.steps() != steps()) {
        throw DimensionError(std::string(where) + ": block vector shape does not match the preconditioner");
    }
}

void SchurPreconditioner::apply_Hinv(const BlockVector& r, BlockVector& out, ApplyTimings* timings) const
{
    require_shape(r, "apply_Hinv");
    const double scale = 2.0 * tau_ / static_cast<double>(steps());

    auto t0 = Clock::now();
    BlockVector hat = plan_.inverse_transpose(r);
    const double fft_in = seconds_since(t0);

    t0 = Clock::now();
    BlockVector solved(dim(), steps());
    parallel_for(steps(), [&](std::ptrdiff_t k) {
        SpatialVector t(dim());
        SpatialVector at(dim());
        const SpatialSolver& w = *solvers_[static_cast<std::size_t>(k)];
        w.apply_inverse(hat.block(k), t);
        a_ref_.multiply(t, at);
        w.apply_inverse(at, solved.block(k));
        solved.block(k) *= scale;
    });
    const double spatial = seconds_since(t0);

    t0 = Clock::now();
    plan_.inverse(solved, out);
    const double fft_out = seconds_since(t0);

    if (timings) {
        timings->fft_seconds += fft_in + fft_out;
        timings->spatial_seconds += spatial;
    }
}

BlockVector SchurPreconditioner::apply_Hinv(const BlockVector& r) const
{
    BlockVector out;
    apply_Hinv(r, out);
    return out;
}

template <typename ApplyG>
void SchurPreconditioner::apply_hat_blocks(const BlockVector& in, BlockVector& out, ApplyG&& g) const
{
    const double scale = static_cast<double>(steps()) / (2.0 * tau_);
    const BlockVector hat = plan_.forward(in);
    BlockVector blocks(dim(), steps());
    parallel_for(steps(), [&](std::ptrdiff_t k) {
        SpatialVector gu(dim());
        SpatialVector t(dim());
        g(k, hat.block(k), gu);
        a_ref_factor_->solve(gu, t);
        g(k, t, blocks.block(k));
        blocks.block(k) *= scale;
    });
    plan_.forward_transpose(blocks, out);
}

void SchurPreconditioner::apply_H(const BlockVector& u, BlockVector& out) const
{
    require_shape(u, "apply_H");
    if (!exact()) {
        throw DiagnosticModeRequired("apply_H: only available with direct spatial solvers");
    }
    apply_hat_blocks(u, out, [&](Index k, ConstVectorRef in, VectorRef res) {
        SpatialVector m(dim());
        mass_.multiply(in, m);
        a_ref_.multiply(in, res);
        res = mu_[k] * m + tau_ * res;
    });
}

BlockVector SchurPreconditioner::apply_H(const BlockVector& u) const
{
    BlockVector out;
    apply_H(u, out);
    return out;
}

void SchurPreconditioner::apply_Htilde(const BlockVector& u, BlockVector& out) const
{
    require_shape(u, "apply_Htilde");
    if (exact()) {
        apply_H(u, out);
        return;
    }
    // Iterative solvers have no stored A factorization; build one for the
    // diagnostic on the fly.
    const CholeskyFactor a_factor(a_ref_);
    const double scale = static_cast<double>(steps()) / (2.0 * tau_);
    const BlockVector hat = plan_.forward(u);
    BlockVector blocks(dim(), steps());
    parallel_for(steps(), [&](std::ptrdiff_t k) {
        const SpatialSolver& w = *solvers_[static_cast<std::size_t>(k)];
        SpatialVector gu(dim());
        SpatialVector t(dim());
        w.apply_forward(hat.block(k), gu);
        a_factor.solve(gu, t);
        w.apply_forward(t, blocks.block(k));
        blocks.block(k) *= scale;
    });
    plan_.forward_transpose(blocks, out);
}

}  // namespace timepar
