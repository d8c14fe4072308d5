#include "test_support.hpp"

#include "timepar/errors.hpp"
#include "timepar/experiments.hpp"
#include "timepar/parallel.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace timepar;

TEST(Experiments, CellsFromH)
{
    EXPECT_EQ(cells_from_h(0.125), 8);
    EXPECT_EQ(cells_from_h(1.0 / 64), 64);
    EXPECT_THROW(cells_from_h(0.3), InputError);
    EXPECT_THROW(cells_from_h(1.0), InputError);
}

TEST(Experiments, CoefficientProfiles)
{
    EXPECT_EQ(parse_coefficient_profile("step"), CoefficientProfile::step);
    EXPECT_THROW(parse_coefficient_profile("wave"), InputError);
    const Coefficient step = make_coefficient(CoefficientProfile::step, 2.0);
    EXPECT_DOUBLE_EQ(step(0.5), 2.0);
    EXPECT_DOUBLE_EQ(step(1.5), 1.0);
    const Coefficient smooth = make_coefficient(CoefficientProfile::smooth, 1.0);
    EXPECT_NEAR(smooth(0.25), 1.5, 1e-15);
}

TEST(Experiments, HierarchyOnlyForPowersOfTwo)
{
    ProblemConfig c;
    c.h = 0.125;
    EXPECT_NE(hierarchy_for(make_problem(c)), nullptr);
    c.h = 1.0 / 12;
    EXPECT_EQ(hierarchy_for(make_problem(c)), nullptr);
}

TEST(Experiments, Table1SmallestCell)
{
    const Table1Row row = table1_cell(1.0 / 64, 4);
    EXPECT_NEAR(row.lambda_min, 0.80992, 1e-3);
    EXPECT_NEAR(row.lambda_max, 1.99991, 1e-3);
    EXPECT_NEAR(row.kappa, 2.46927, 1e-3);
    EXPECT_FALSE(row.lanczos);
}

TEST(Experiments, Table2CellConverges)
{
    const Table2Row row = table2_cell(0.125, 16);
    EXPECT_TRUE(row.converged);
    EXPECT_GT(row.iterations, 5);
    EXPECT_LT(row.iterations, 40);
}

TEST(Experiments, HistoryCsvIsIndependentOfThreadCount)
{
    HistoryOptions options;
    options.problem.space = SpaceDim::two;
    options.problem.h = 0.0625;
    options.problem.steps = 32;
    options.solvers = {parse_solver_config("mg")};
    options.max_iter = 15;
    std::string reference;
    for (int threads : {1, 2, 3}) {
        set_num_threads(threads);
        std::ostringstream os;
        write_history_csv(os, run_history(options));
        if (reference.empty()) {
            reference = os.str();
        } else {
            EXPECT_EQ(os.str(), reference) << threads;
        }
    }
    set_num_threads(0);
}

TEST(Experiments, SolveReportsEulerDifference)
{
    SolveOptions options;
    options.problem.h = 0.125;
    options.problem.steps = 16;
    options.solver = parse_solver_config("mg");
    options.tol = 1e-10;
    const SolveReport r = run_solve(options);
    EXPECT_TRUE(r.history.converged);
    EXPECT_LT(r.euler_difference, 1e-7);
    EXPECT_GT(r.rho_A, 0.0);
    EXPECT_LT(r.rho_A, 1.0);
    options.method = "minres";
    EXPECT_TRUE(run_solve(options).history.converged);
    options.method = "gmres";
    EXPECT_THROW(run_solve(options), InputError);
}

TEST(Experiments, ScalingReportsEveryThreadCount)
{
    ScalingOptions options;
    options.problem.h = 0.125;
    options.problem.steps = 64;
    options.threads = {1, 2};
    options.iterations = 2;
    options.repeats = 1;
    const auto rows = run_scaling(options);
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& r : rows) {
        EXPECT_GT(r.time_per_iter, 0.0);
        EXPECT_GE(r.fft_share, 0.0);
        EXPECT_LE(r.fft_share + r.spatial_share, 1.0 + 1e-12);
    }
}
