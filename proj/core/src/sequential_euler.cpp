#include "timepar/errors.hpp"
#include "timepar/iterative_solvers.hpp"

#include <optional>

namespace timepar {

BlockVector sequential_euler_solve(const ProblemSpec& spec)
{
    spec.validate();
    const Index dim = spec.dim();
    BlockVector u(dim, spec.steps());
    SpatialVector prev = spec.initial;
    SpatialVector rhs(dim);

    // Consecutive steps with the same (base, tau_n * scale_n) reuse one factor.
    const SpatialMatrix* factor_base = nullptr;
    double factor_weight = 0.0;
    std::optional<CholeskyFactor> factor;
    for (int n = 0; n < spec.steps(); ++n) {
        const auto& op = spec.stiffness[static_cast<std::size_t>(n)];
        const double tau = spec.grid.step(n);
        const double weight = tau * op.scale;
        if (!factor || factor_base != op.base.get() || factor_weight != weight) {
            factor.emplace(SpatialMatrix::combine(1.0, spec.mass, weight, *op.base));
            factor_base = op.base.get();
            factor_weight = weight;
        }
        spec.mass.multiply(prev, rhs);
        rhs += tau * spec.load[static_cast<std::size_t>(n)];
        factor->solve(rhs, u.block(n));
        prev = u.block(n);
    }
    return u;
}

}  // namespace timepar
