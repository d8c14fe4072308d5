#include "timepar/dst.hpp"
#include "timepar/experiments.hpp"
#include "timepar/iterative_solvers.hpp"
#include "timepar/schur_preconditioner.hpp"
#include "timepar/spatial_solvers.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace timepar;

namespace {

ProblemSpec problem(SpaceDim space, double h, int steps)
{
    ProblemConfig c;
    c.space = space;
    c.h = h;
    c.steps = steps;
    return make_problem(c);
}

}  // namespace

static void BM_DstForward(benchmark::State& state)
{
    const Index n = state.range(0);
    const DstPath path = state.range(1) != 0 ? DstPath::automatic : DstPath::naive;
    const DstPlan plan(n, path);
    std::mt19937_64 rng(1);
    const BlockVector u = BlockVector::random(63, n, rng);
    BlockVector out;
    for (auto _ : state) {
        plan.forward(u, out);
        benchmark::DoNotOptimize(out.data().data());
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_DstForward)->ArgsProduct({{64, 256, 1024, 4096}, {1}})->Complexity(benchmark::oNLogN);
BENCHMARK(BM_DstForward)->ArgsProduct({{64, 256}, {0}});

static void BM_VCycle(benchmark::State& state)
{
    const int cells = static_cast<int>(state.range(0));
    const SpaceDim space = state.range(1) == 2 ? SpaceDim::two : SpaceDim::one;
    const auto ms = space == SpaceDim::two ? assemble_mass_stiffness_2d(cells) : assemble_mass_stiffness_1d(cells);
    const auto solver = make_spatial_solver(ms.stiffness, parse_solver_config("mg"), build_mg_hierarchy(space, cells));
    const SpatialVector b = SpatialVector::Ones(solver->dim());
    SpatialVector x(solver->dim());
    for (auto _ : state) {
        solver->apply_inverse(b, x);
        benchmark::DoNotOptimize(x.data());
    }
}
BENCHMARK(BM_VCycle)->Args({128, 1})->Args({1024, 1})->Args({32, 2})->Args({64, 2});

static void BM_ApplyHinv(benchmark::State& state)
{
    const ProblemSpec spec = problem(SpaceDim::one, 1.0 / 128, static_cast<int>(state.range(0)));
    const SchurPreconditioner pc(spec, parse_solver_config("mg"), hierarchy_for(spec));
    std::mt19937_64 rng(2);
    const BlockVector r = BlockVector::random(spec.dim(), spec.steps(), rng);
    BlockVector out;
    for (auto _ : state) {
        pc.apply_Hinv(r, out);
        benchmark::DoNotOptimize(out.data().data());
    }
}
BENCHMARK(BM_ApplyHinv)->Arg(256)->Arg(1024);

static void BM_UzawaIteration(benchmark::State& state)
{
    const ProblemSpec spec = problem(SpaceDim::two, 1.0 / 32, static_cast<int>(state.range(0)));
    const auto hierarchy = hierarchy_for(spec);
    const SolverConfig solver = parse_solver_config("mg");
    const TimeGlobalSystem system(spec);
    const StepPreconditioner a_tilde(spec, solver, hierarchy);
    const SchurPreconditioner h_tilde(spec, solver, hierarchy);
    UzawaConfig config;
    config.tol = 1e-300;
    config.max_iter = 1;
    config.record_history = false;
    for (auto _ : state) {
        const SolveResult r = uzawa_solve(system, a_tilde, h_tilde, config);
        benchmark::DoNotOptimize(r.solution.u.data().data());
    }
}
BENCHMARK(BM_UzawaIteration)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
