#include "timepar/errors.hpp"
#include "timepar/iterative_solvers.hpp"

#include <chrono>
#include <cmath>

namespace timepar {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

// Preconditioned MINRES in the Lanczos/Givens form of Elman, Silvester and
// Wathen; v_j are unnormalized Lanczos vectors, z_j = P^{-1} v_j.
SolveResult minres_solve(const TimeGlobalSystem& system, const StepPreconditioner& a_tilde,
                         const SchurPreconditioner& h_tilde, const MinresConfig& config, Reference reference)
{
    if (!(config.tol > 0.0) || config.max_iter < 0) {
        throw InputError("minres_solve: need tol > 0 and max_iter >= 0");
    }
    const Index dim = system.dim();
    const Index steps = system.steps();
    if (h_tilde.dim() != dim || h_tilde.steps() != steps) {
        throw DimensionError("minres_solve: preconditioner does not match the system");
    }
    if (config.stopping == StoppingRule::s_norm_error && (!reference.u || !system.diagnostics())) {
        throw DiagnosticModeRequired("minres_solve: the s-norm stopping rule needs a reference solution and "
                                     "a system with diagnostics enabled");
    }
    const bool track_s = reference.u && system.diagnostics();

    const auto start = Clock::now();
    ApplyTimings timings;
    auto precondition = [&](const SaddleVector& v, SaddleVector& z) {
        const auto t0 = Clock::now();
        a_tilde.apply_inverse(v.p, z.p);
        timings.spatial_seconds += seconds_since(t0);
        h_tilde.apply_Hinv(v.u, z.u, &timings);
    };
    auto inner = [](const SaddleVector& z, const SaddleVector& v, int j) {
        const double value = z.dot(v);
        if (value < 0.0) {
            throw NonSpdError("minres_solve: preconditioner is not positive definite (iteration " +
                              std::to_string(j) + ")");
        }
        return std::sqrt(value);
    };

    SolveResult result;
    result.history.solver = "minres";
    SaddleVector x(dim, steps);
    const BlockVector& f = system.rhs();
    SaddleVector v(-1.0 * f, -1.0 * f);
    SaddleVector v_prev(dim, steps);
    SaddleVector z(dim, steps);
    precondition(v, z);
    double gamma = inner(z, v, 0);
    double gamma_prev = 1.0;
    const double g_norm = gamma > 0.0 ? gamma : 1.0;
    double eta = gamma;
    double s_prev = 0.0;
    double s = 0.0;
    double c_prev = 1.0;
    double c = 1.0;
    SaddleVector w_prev(dim, steps);
    SaddleVector w(dim, steps);
    const double u_ref_s = track_s ? system.s_norm(*reference.u) : 0.0;
    const double s_scale = u_ref_s > 0.0 ? u_ref_s : 1.0;

    auto record = [&](int j) {
        HistoryEntry entry;
        entry.iter = j;
        entry.residual = std::abs(eta) / g_norm;
        if (track_s) {
            entry.s_norm_error = system.s_norm(*reference.u - x.u) / s_scale;
        }
        entry.wall_seconds = seconds_since(start);
        entry.fft_seconds = timings.fft_seconds;
        entry.spatial_seconds = timings.spatial_seconds;
        if (config.record_history || result.history.entries.empty()) {
            result.history.entries.push_back(entry);
        } else {
            result.history.entries.back() = entry;
        }
        const double monitor = config.stopping == StoppingRule::s_norm_error ? *entry.s_norm_error : entry.residual;
        if (!std::isfinite(monitor)) {
            throw DivergenceError("minres_solve: non-finite residual at iteration " + std::to_string(j));
        }
        return monitor <= config.tol;
    };

    if (record(0) || gamma == 0.0) {
        result.history.converged = true;
        result.solution = std::move(x);
        return result;
    }

    SaddleVector az;
    SaddleVector v_next;
    for (int j = 1; j <= config.max_iter; ++j) {
        z *= 1.0 / gamma;
        system.apply_saddle(z, az);
        const double delta = az.dot(z);

        v_next = az;
        v_next.axpy(-delta / gamma, v);
        v_next.axpy(-gamma / gamma_prev, v_prev);
        SaddleVector z_next(dim, steps);
        precondition(v_next, z_next);
        const double gamma_next = inner(z_next, v_next, j);

        const double a0 = c * delta - c_prev * s * gamma;
        const double a1 = std::sqrt(a0 * a0 + gamma_next * gamma_next);
        const double a2 = s * delta + c_prev * c * gamma;
        const double a3 = s_prev * gamma;
        const double c_next = a0 / a1;
        const double s_next = gamma_next / a1;

        SaddleVector w_next = z;
        w_next.axpy(-a3, w_prev);
        w_next.axpy(-a2, w);
        w_next *= 1.0 / a1;
        x.axpy(c_next * eta, w_next);
        eta = -s_next * eta;

        v_prev = std::move(v);
        v = std::move(v_next);
        z = std::move(z_next);
        w_prev = std::move(w);
        w = std::move(w_next);
        gamma_prev = gamma;
        gamma = gamma_next;
        c_prev = c;
        c = c_next;
        s_prev = s;
        s = s_next;

        result.history.iterations = j;
        if (record(j) || gamma == 0.0) {
            result.history.converged = true;
            break;
        }
    }
    result.solution = std::move(x);
    return result;
}

}  // namespace timepar
