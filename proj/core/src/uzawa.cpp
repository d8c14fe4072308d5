#include "timepar/errors.hpp"
#include "timepar/iterative_solvers.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace timepar {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

void UzawaConfig::validate() const
{
    if (!(omega > 0.0)) {
        throw InputError("UzawaConfig: omega must be positive");
    }
    if (!(tol > 0.0)) {
        throw InputError("UzawaConfig: tol must be positive");
    }
    if (max_iter < 0) {
        throw InputError("UzawaConfig: max_iter must be non-negative");
    }
    if (!(rho_A >= 0.0 && rho_A < 1.0)) {
        throw InputError("UzawaConfig: rho_A must lie in [0, 1)");
    }
}

RateReport compute_rate_report(double rho_A, double omega, double lambda_min, double lambda_max)
{
    if (!(rho_A >= 0.0 && rho_A < 1.0)) {
        throw InputError("compute_rate_report: rho_A must lie in [0, 1), got " + std::to_string(rho_A));
    }
    if (!(omega > 0.0) || !(lambda_min > 0.0) || !(lambda_max >= lambda_min)) {
        throw InputError("compute_rate_report: need omega > 0 and 0 < lambda_min <= lambda_max");
    }
    RateReport r{rho_A, omega, lambda_min, lambda_max};
    const double lo = (1.0 - rho_A) * (1.0 - omega * lambda_min);
    r.sigma_minus = 0.5 * (lo + std::sqrt(4.0 * rho_A + lo * lo));
    const double hi = (1.0 + rho_A) * (1.0 + omega * lambda_max) - 2.0;
    r.sigma_plus = 0.5 * (hi + std::sqrt(4.0 * rho_A + hi * hi));
    r.rho_U = std::max(r.sigma_minus, r.sigma_plus);
    r.damping_ok = omega * lambda_max < 2.0 * (1.0 - rho_A) / (1.0 + rho_A);
    return r;
}

double d_norm(const SaddleVector& w, double omega, double rho_A, const StepPreconditioner& a_tilde,
              const SchurPreconditioner& h_tilde)
{
    BlockVector hu;
    h_tilde.apply_Htilde(w.u, hu);
    double sq = w.u.dot(hu);
    if (rho_A > 0.0) {
        BlockVector ap;
        a_tilde.apply_forward(w.p, ap);
        sq += omega * rho_A * w.p.dot(ap);
    }
    return std::sqrt(std::max(sq, 0.0));
}

SolveResult uzawa_solve(const TimeGlobalSystem& system, const StepPreconditioner& a_tilde,
                        const SchurPreconditioner& h_tilde, const UzawaConfig& config, Reference reference,
                        const SaddleVector* initial)
{
    config.validate();
    const Index dim = system.dim();
    const Index steps = system.steps();
    if (h_tilde.dim() != dim || h_tilde.steps() != steps) {
        throw DimensionError("uzawa_solve: preconditioner does not match the system");
    }
    if (config.stopping == StoppingRule::s_norm_error && (!reference.u || !system.diagnostics())) {
        throw DiagnosticModeRequired("uzawa_solve: the s-norm stopping rule needs a reference solution and "
                                     "a system with diagnostics enabled");
    }
    const bool track_s = reference.u && system.diagnostics();
    const bool track_d = reference.u && config.record_d_norm;
    if (reference.u) {
        require_same_shape(*reference.u, system.rhs(), "uzawa_solve reference");
    }

    SolveResult result;
    result.history.solver = "uzawa";
    SaddleVector w = initial ? *initial : SaddleVector(dim, steps);
    require_same_shape(w.u, system.rhs(), "uzawa_solve initial guess");
    const BlockVector& f = system.rhs();

    const auto start = Clock::now();
    ApplyTimings timings;

    // Preconditioned norm of g = [-f, -f].
    BlockVector tmp;
    auto timed_a_inverse = [&](const BlockVector& in, BlockVector& out) {
        const auto t0 = Clock::now();
        a_tilde.apply_inverse(in, out);
        timings.spatial_seconds += seconds_since(t0);
    };
    timed_a_inverse(f, tmp);
    double g_sq = f.dot(tmp);
    h_tilde.apply_Hinv(f, tmp, &timings);
    g_sq += f.dot(tmp);
    const double g_norm = g_sq > 0.0 ? std::sqrt(g_sq) : 1.0;

    const double u_ref_s = track_s ? system.s_norm(*reference.u) : 0.0;
    const double s_scale = u_ref_s > 0.0 ? u_ref_s : 1.0;

    BlockVector r_p;
    BlockVector r_u;
    BlockVector d_p;
    BlockVector d_u;
    double first_monitor = -1.0;

    for (int j = 0;; ++j) {
        // p-step residual K u - A p - f at the current iterate.
        system.apply_K(w.u, r_p);
        system.apply_Abd(w.p, tmp);
        r_p -= tmp;
        r_p -= f;
        timed_a_inverse(r_p, d_p);
        BlockVector p_next = w.p + d_p;

        // u-step residual f - K^T p_{j+1} - (K + K^T + A) u_j.
        system.apply_Kt(p_next, r_u);
        system.apply_sym_part(w.u, tmp);
        r_u += tmp;
        r_u *= -1.0;
        r_u += f;
        h_tilde.apply_Hinv(r_u, d_u, &timings);

        HistoryEntry entry;
        entry.iter = j;
        entry.residual = std::sqrt(std::max(r_p.dot(d_p) + r_u.dot(d_u), 0.0)) / g_norm;
        if (track_s) {
            entry.s_norm_error = system.s_norm(*reference.u - w.u) / s_scale;
        }
        if (track_d) {
            SaddleVector err(-1.0 * *reference.u - w.p, *reference.u - w.u);
            entry.d_norm_error = d_norm(err, config.omega, config.rho_A, a_tilde, h_tilde);
        }
        entry.wall_seconds = seconds_since(start);
        entry.fft_seconds = timings.fft_seconds;
        entry.spatial_seconds = timings.spatial_seconds;

        const double monitor = config.stopping == StoppingRule::s_norm_error ? *entry.s_norm_error : entry.residual;
        if (config.record_history || j == 0) {
            result.history.entries.push_back(entry);
        } else {
            result.history.entries.back() = entry;
        }
        if (!std::isfinite(monitor)) {
            throw DivergenceError("uzawa_solve: non-finite residual at iteration " + std::to_string(j));
        }
        if (monitor <= config.tol) {
            result.history.converged = true;
            result.history.iterations = j;
            break;
        }
        if (j == 0) {
            first_monitor = monitor;
        } else if (monitor > config.divergence_factor * first_monitor) {
            std::ostringstream os;
            os << "uzawa_solve: diverged at iteration " << j << " (monitored value " << monitor
               << ", initial " << first_monitor << "); check omega and the spatial solvers";
            throw DivergenceError(os.str());
        }
        if (j == config.max_iter) {
            result.history.iterations = j;
            break;
        }
        w.p = std::move(p_next);
        w.u.axpy(config.omega, d_u);
    }
    result.solution = std::move(w);
    return result;
}

}  // namespace timepar
