#include "timepar/time_operators.hpp"

#include "timepar/errors.hpp"
#include "timepar/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace timepar {

TimeGlobalSystem::TimeGlobalSystem(ProblemSpec spec, bool diagnostics) : spec_(std::move(spec))
{
    spec_.validate();
    const Index n_steps = steps();
    rhs_ = BlockVector(dim(), n_steps);
    for (Index n = 0; n < n_steps; ++n) {
        rhs_.block(n) = spec_.grid.step(static_cast<int>(n)) * spec_.load[static_cast<std::size_t>(n)];
    }
    rhs_.block(0) += spmv(spec_.mass, spec_.initial);

    if (diagnostics) {
        step_factor_.resize(static_cast<std::size_t>(n_steps));
        for (Index n = 0; n < n_steps; ++n) {
            const SpatialMatrix* base = spec_.stiffness[static_cast<std::size_t>(n)].base.get();
            auto it = std::find_if(exact_.begin(), exact_.end(), [base](const ExactFactor& f) { return f.base == base; });
            if (it == exact_.end()) {
                exact_.push_back({base, CholeskyFactor(*base)});
                it = exact_.end() - 1;
            }
            step_factor_[static_cast<std::size_t>(n)] = static_cast<std::size_t>(it - exact_.begin());
        }
    }
}

void TimeGlobalSystem::require_diagnostics(const char* where) const
{
    if (!diagnostics()) {
        throw DiagnosticModeRequired(std::string(where) + ": needs exact spatial factorizations (diagnostic mode)");
    }
}

void TimeGlobalSystem::require_shape(const BlockVector& u, const char* where) const
{
    if (u.dim() != dim() || u.steps() != steps()) {
        throw DimensionError(std::string(where) + ": expected " + std::to_string(dim()) + "x" +
                             std::to_string(steps()) + " block vector, got " + std::to_string(u.dim()) + "x" +
                             std::to_string(u.steps()));
    }
}

double TimeGlobalSystem::step_weight(Index n) const
{
    return spec_.grid.step(static_cast<int>(n)) * spec_.stiffness[static_cast<std::size_t>(n)].scale;
}

void TimeGlobalSystem::apply_K(const BlockVector& u, BlockVector& out) const
{
    require_shape(u, "apply_K");
    out = zeros();
    parallel_for(steps(), [&](std::ptrdiff_t n) {
        if (n == 0) {
            spec_.mass.multiply(u.block(0), out.block(0));
        } else {
            spec_.mass.multiply(u.block(n) - u.block(n - 1), out.block(n));
        }
    });
}

void TimeGlobalSystem::apply_Kt(const BlockVector& u, BlockVector& out) const
{
    require_shape(u, "apply_Kt");
    out = zeros();
    const Index last = steps() - 1;
    parallel_for(steps(), [&](std::ptrdiff_t n) {
        if (n == last) {
            spec_.mass.multiply(u.block(n), out.block(n));
        } else {
            spec_.mass.multiply(u.block(n) - u.block(n + 1), out.block(n));
        }
    });
}

void TimeGlobalSystem::apply_Abd(const BlockVector& u, BlockVector& out) const
{
    require_shape(u, "apply_Abd");
    out = zeros();
    parallel_for(steps(), [&](std::ptrdiff_t n) {
        spec_.stiffness[static_cast<std::size_t>(n)].base->multiply(u.block(n), out.block(n));
        out.block(n) *= step_weight(n);
    });
}

void TimeGlobalSystem::apply_B(const BlockVector& u, BlockVector& out) const
{
    BlockVector a;
    apply_K(u, out);
    apply_Abd(u, a);
    out += a;
}

void TimeGlobalSystem::apply_Bt(const BlockVector& u, BlockVector& out) const
{
    BlockVector a;
    apply_Kt(u, out);
    apply_Abd(u, a);
    out += a;
}

void TimeGlobalSystem::apply_sym_part(const BlockVector& u, BlockVector& out) const
{
    BlockVector tmp;
    apply_B(u, out);
    apply_Kt(u, tmp);
    out += tmp;
}

void TimeGlobalSystem::apply_saddle(const SaddleVector& w, SaddleVector& out) const
{
    BlockVector tmp;
    apply_Abd(w.p, out.p);
    apply_K(w.u, tmp);
    out.p -= tmp;

    apply_Kt(w.p, out.u);
    apply_sym_part(w.u, tmp);
    out.u += tmp;
    out.u *= -1.0;
}

void TimeGlobalSystem::apply_Abd_inv(const BlockVector& u, BlockVector& out) const
{
    require_diagnostics("apply_Abd_inv");
    require_shape(u, "apply_Abd_inv");
    out = zeros();
    parallel_for(steps(), [&](std::ptrdiff_t n) {
        factor_for(n).solve(u.block(n), out.block(n));
        out.block(n) /= step_weight(n);
    });
}

void TimeGlobalSystem::apply_P(const BlockVector& u, BlockVector& out) const
{
    require_diagnostics("apply_P");
    BlockVector ku;
    apply_K(u, ku);
    apply_Abd_inv(ku, out);
    out += u;
}

void TimeGlobalSystem::apply_Pt(const BlockVector& u, BlockVector& out) const
{
    require_diagnostics("apply_Pt");
    BlockVector ainv;
    apply_Abd_inv(u, ainv);
    apply_Kt(ainv, out);
    out += u;
}

void TimeGlobalSystem::apply_S(const BlockVector& u, BlockVector& out) const
{
    require_diagnostics("apply_S");
    BlockVector ku;
    BlockVector tmp;
    apply_K(u, ku);
    apply_Abd_inv(ku, tmp);
    apply_Kt(tmp, out);
    apply_sym_part(u, tmp);
    out += tmp;
}

BlockVector TimeGlobalSystem::apply_K(const BlockVector& u) const
{
    BlockVector out;
    apply_K(u, out);
    return out;
}

BlockVector TimeGlobalSystem::apply_Kt(const BlockVector& u) const
{
    BlockVector out;
    apply_Kt(u, out);
    return out;
}

BlockVector TimeGlobalSystem::apply_Abd(const BlockVector& u) const
{
    BlockVector out;
    apply_Abd(u, out);
    return out;
}

BlockVector TimeGlobalSystem::apply_B(const BlockVector& u) const
{
    BlockVector out;
    apply_B(u, out);
    return out;
}

BlockVector TimeGlobalSystem::apply_Bt(const BlockVector& u) const
{
    BlockVector out;
    apply_Bt(u, out);
    return out;
}

SaddleVector TimeGlobalSystem::apply_saddle(const SaddleVector& w) const
{
    SaddleVector out;
    apply_saddle(w, out);
    return out;
}

BlockVector TimeGlobalSystem::apply_Abd_inv(const BlockVector& u) const
{
    BlockVector out;
    apply_Abd_inv(u, out);
    return out;
}

BlockVector TimeGlobalSystem::apply_P(const BlockVector& u) const
{
    BlockVector out;
    apply_P(u, out);
    return out;
}

BlockVector TimeGlobalSystem::apply_Pt(const BlockVector& u) const
{
    BlockVector out;
    apply_Pt(u, out);
    return out;
}

BlockVector TimeGlobalSystem::apply_S(const BlockVector& u) const
{
    BlockVector out;
    apply_S(u, out);
    return out;
}

namespace {

// Per-block terms are computed in parallel and summed in block order so the
// result is independent of the thread count.
template <typename Term>
double ordered_sum(Index count, Term&& term)
{
    std::vector<double> parts(static_cast<std::size_t>(count));
    parallel_for(count, [&](std::ptrdiff_t n) { parts[static_cast<std::size_t>(n)] = term(n); });
    double sum = 0.0;
    for (double p : parts) {
        sum += p;
    }
    return sum;
}

}  // namespace

double TimeGlobalSystem::a_norm(const BlockVector& u) const
{
    require_shape(u, "a_norm");
    const double sq = ordered_sum(steps(), [&](Index n) {
        SpatialVector au(dim());
        spec_.stiffness[static_cast<std::size_t>(n)].base->multiply(u.block(n), au);
        return step_weight(n) * u.block(n).dot(au);
    });
    return std::sqrt(std::max(sq, 0.0));
}

double TimeGlobalSystem::s_volume_form(const BlockVector& u, const BlockVector& v) const
{
    require_diagnostics("s_volume_form");
    require_shape(u, "s_volume_form");
    require_shape(v, "s_volume_form");
    return ordered_sum(steps(), [&](Index n) {
        const SpatialMatrix& base = *spec_.stiffness[static_cast<std::size_t>(n)].base;
        SpatialVector du = u.block(n);
        SpatialVector dv = v.block(n);
        if (n > 0) {
            du -= u.block(n - 1);
            dv -= v.block(n - 1);
        }
        SpatialVector mdu(dim());
        SpatialVector mdv(dim());
        spec_.mass.multiply(du, mdu);
        spec_.mass.multiply(dv, mdv);
        const double w = step_weight(n);
        SpatialVector av(dim());
        base.multiply(v.block(n), av);
        return mdu.dot(factor_for(n).solve(mdv)) / w + w * u.block(n).dot(av);
    });
}

double TimeGlobalSystem::jump_form(const BlockVector& u, const BlockVector& v) const
{
    require_shape(u, "jump_form");
    require_shape(v, "jump_form");
    const Index last = steps() - 1;
    const double jumps = ordered_sum(steps(), [&](Index n) {
        SpatialVector du = u.block(n);
        SpatialVector dv = v.block(n);
        if (n > 0) {
            du -= u.block(n - 1);
            dv -= v.block(n - 1);
        }
        SpatialVector mdv(dim());
        spec_.mass.multiply(dv, mdv);
        return du.dot(mdv);
    });
    SpatialVector mv(dim());
    spec_.mass.multiply(v.block(last), mv);
    return u.block(last).dot(mv) + jumps;
}

double TimeGlobalSystem::s_norm(const BlockVector& u) const
{
    const double sq = s_volume_form(u, u) + jump_form(u, u);
    return std::sqrt(std::max(sq, 0.0));
}

double TimeGlobalSystem::s_D(const BlockVector& u, const BlockVector& v) const
{
    require_diagnostics("s_D");
    require_shape(u, "s_D");
    require_shape(v, "s_D");
    // The volume form minus half of the last A_N term.
    const Index last = steps() - 1;
    SpatialVector av(dim());
    spec_.stiffness[static_cast<std::size_t>(last)].base->multiply(v.block(last), av);
    return s_volume_form(u, v) - 0.5 * step_weight(last) * u.block(last).dot(av);
}

double TimeGlobalSystem::max_m_norm(const BlockVector& u) const
{
    require_shape(u, "max_m_norm");
    double best = 0.0;
    for (Index n = 0; n < steps(); ++n) {
        best = std::max(best, weighted_norm(spec_.mass, u.block(n)));
    }
    return best;
}

}  // namespace timepar
