#include "test_support.hpp"

#include "timepar/errors.hpp"
#include "timepar/iterative_solvers.hpp"
#include "timepar/time_operators.hpp"

#include <gtest/gtest.h>

#include <Eigen/SVD>

using namespace timepar;
using namespace timepar::testing;

namespace {

BlockVector scalar_blocks(std::initializer_list<double> values)
{
    BlockVector v(1, static_cast<Index>(values.size()));
    Index i = 0;
    for (double x : values) {
        v.data()(0, i++) = x;
    }
    return v;
}

void expect_blocks(const BlockVector& v, std::initializer_list<double> values, double tol = 1e-15)
{
    ASSERT_EQ(v.steps(), static_cast<Index>(values.size()));
    Index i = 0;
    for (double x : values) {
        EXPECT_NEAR(v.data()(0, i++), x, tol);
    }
}

struct Instance {
    ProblemSpec spec;
    DenseSystem dense;
};

Instance random_instance(std::mt19937_64& rng, Index dim = 3, int steps = 4)
{
    Instance in{random_problem(dim, random_nodes(steps, rng), rng), {}};
    in.dense = dense_system(in.spec);
    return in;
}

}  // namespace

TEST(ApplyK, ScalarExamples)
{
    const TimeGlobalSystem sys(scalar_problem(uniform_nodes(3)));
    expect_blocks(sys.apply_K(scalar_blocks({1, 1, 1})), {1, 0, 0});
    expect_blocks(sys.apply_K(sys.zeros()), {0, 0, 0});
    expect_blocks(sys.apply_Kt(scalar_blocks({1, 1, 1})), {0, 0, 1});
    expect_blocks(sys.apply_Kt(scalar_blocks({0, 0, 1})), {0, -1, 1});
}

TEST(ApplyK, MatchesDenseKronecker)
{
    std::mt19937_64 rng(1);
    const Instance in = random_instance(rng);
    const TimeGlobalSystem sys(in.spec);
    const BlockVector u = BlockVector::random(3, 4, rng);
    EXPECT_LT((flat(sys.apply_K(u)) - in.dense.K * flat(u)).norm(), 1e-14 * (in.dense.K * flat(u)).norm());
    EXPECT_LT((flat(sys.apply_Kt(u)) - in.dense.K.transpose() * flat(u)).norm(), 1e-14 * flat(u).norm() * in.dense.K.norm());
    EXPECT_LT((flat(sys.apply_Abd(u)) - in.dense.A * flat(u)).norm(), 1e-13 * (in.dense.A * flat(u)).norm());
}

TEST(ApplyK, AdjointIdentities)
{
    std::mt19937_64 rng(2);
    const Instance in = random_instance(rng, 4, 6);
    const TimeGlobalSystem sys(in.spec);
    for (int t = 0; t < 10; ++t) {
        const BlockVector u = BlockVector::random(4, 6, rng);
        const BlockVector v = BlockVector::random(4, 6, rng);
        const double scale = u.norm() * v.norm();
        EXPECT_NEAR(v.dot(sys.apply_K(u)), u.dot(sys.apply_Kt(v)), 1e-13 * scale * in.dense.K.norm());
        EXPECT_NEAR(v.dot(sys.apply_B(u)), u.dot(sys.apply_Bt(v)), 1e-13 * scale * (in.dense.K.norm() + in.dense.A.norm()));
    }
}

TEST(ApplyB, ScalarHeatOde)
{
    const TimeGlobalSystem sys(scalar_problem(uniform_nodes(3)));
    expect_blocks(sys.apply_B(scalar_blocks({1, 1, 1})), {2, 1, 1});
}

TEST(Rhs, InitialDatumFoldedIntoFirstBlock)
{
    std::mt19937_64 rng(3);
    const ProblemSpec spec = random_problem(3, random_nodes(5, rng), rng);
    const TimeGlobalSystem sys(spec);
    const SpatialVector first = spec.grid.step(0) * spec.load[0] + spmv(spec.mass, spec.initial);
    EXPECT_LT((sys.rhs().block(0) - first).norm(), 1e-14 * first.norm());
    for (int n = 1; n < 5; ++n) {
        const SpatialVector expected = spec.grid.step(n) * spec.load[static_cast<std::size_t>(n)];
        EXPECT_LT((sys.rhs().block(n) - expected).norm(), 1e-15 * (1.0 + expected.norm()));
    }
}

TEST(Saddle, SelfAdjoint)
{
    std::mt19937_64 rng(4);
    const Instance in = random_instance(rng);
    const TimeGlobalSystem sys(in.spec);
    for (int t = 0; t < 10; ++t) {
        const SaddleVector w(BlockVector::random(3, 4, rng), BlockVector::random(3, 4, rng));
        const SaddleVector z(BlockVector::random(3, 4, rng), BlockVector::random(3, 4, rng));
        const double lhs = w.dot(sys.apply_saddle(z));
        const double rhs = z.dot(sys.apply_saddle(w));
        EXPECT_NEAR(lhs, rhs, 1e-13 * (std::abs(lhs) + 1.0) * (in.dense.K.norm() + in.dense.A.norm()));
    }
}

TEST(Saddle, ExactSolutionGivesRightHandSide)
{
    std::mt19937_64 rng(5);
    const ProblemSpec spec = random_problem(3, random_nodes(5, rng), rng);
    const TimeGlobalSystem sys(spec);
    const BlockVector u = sequential_euler_solve(spec);
    const SaddleVector out = sys.apply_saddle(SaddleVector(-1.0 * u, u));
    const BlockVector minus_f = -1.0 * sys.rhs();
    EXPECT_LT((out.p - minus_f).norm(), 1e-12 * minus_f.norm());
    EXPECT_LT((out.u - minus_f).norm(), 1e-12 * minus_f.norm());
}

TEST(ApplyP, ScalarExample)
{
    const TimeGlobalSystem sys(scalar_problem(uniform_nodes(2)), true);
    expect_blocks(sys.apply_P(scalar_blocks({1, 1})), {2, 1});
    expect_blocks(sys.apply_P(sys.zeros()), {0, 0});
}

TEST(ApplyP, NeedsDiagnostics)
{
    const TimeGlobalSystem sys(scalar_problem(uniform_nodes(2)));
    const BlockVector u = scalar_blocks({1, 1});
    EXPECT_THROW(sys.apply_P(u), DiagnosticModeRequired);
    EXPECT_THROW(sys.apply_S(u), DiagnosticModeRequired);
    EXPECT_THROW(sys.s_norm(u), DiagnosticModeRequired);
}

TEST(ApplyP, MatchesDenseDefinition)
{
    std::mt19937_64 rng(6);
    const Instance in = random_instance(rng);
    const TimeGlobalSystem sys(in.spec, true);
    const Eigen::MatrixXd p = in.dense.A.ldlt().solve(in.dense.K) + Eigen::MatrixXd::Identity(12, 12);
    const BlockVector u = BlockVector::random(3, 4, rng);
    EXPECT_LT((flat(sys.apply_P(u)) - p * flat(u)).norm(), 1e-11 * (p * flat(u)).norm());
    EXPECT_LT((flat(sys.apply_Pt(u)) - p.transpose() * flat(u)).norm(), 1e-11 * (p.transpose() * flat(u)).norm());
}

TEST(ApplyS, ScalarSingleStep)
{
    const TimeGlobalSystem sys(scalar_problem(uniform_nodes(1)), true);
    expect_blocks(sys.apply_S(scalar_blocks({1})), {4}, 1e-14);
    EXPECT_NEAR(sys.s_norm(scalar_blocks({1})), 2.0, 1e-14);
}

TEST(ApplyS, MatchesDenseAssembly)
{
    std::mt19937_64 rng(7);
    const Instance in = random_instance(rng);
    const TimeGlobalSystem sys(in.spec, true);
    const BlockVector u = BlockVector::random(3, 4, rng);
    const Eigen::VectorXd expected = in.dense.S * flat(u);
    EXPECT_LT((flat(sys.apply_S(u)) - expected).norm(), 1e-12 * expected.norm());
    EXPECT_GT(u.dot(sys.apply_S(u)), 0.0);
}

TEST(Norms, ZeroVector)
{
    std::mt19937_64 rng(8);
    const Instance in = random_instance(rng);
    const TimeGlobalSystem sys(in.spec, true);
    const BlockVector z = sys.zeros();
    EXPECT_EQ(sys.s_norm(z), 0.0);
    EXPECT_EQ(sys.a_norm(z), 0.0);
    EXPECT_EQ(sys.max_m_norm(z), 0.0);
    EXPECT_EQ(sys.jump_form(z, z), 0.0);
}

TEST(Norms, SNormSquaredEqualsQuadraticForm)
{
    std::mt19937_64 rng(9);
    const Instance in = random_instance(rng, 3, 7);
    const TimeGlobalSystem sys(in.spec, true);
    for (int t = 0; t < 20; ++t) {
        const BlockVector u = BlockVector::random(3, 7, rng);
        const double quad = flat(u).dot(in.dense.S * flat(u));
        EXPECT_NEAR(std::pow(sys.s_norm(u), 2), quad, 1e-10 * quad);
    }
}

TEST(Norms, InfSupIdentity)
{
    std::mt19937_64 rng(10);
    const Instance in = random_instance(rng, 3, 6);
    const TimeGlobalSystem sys(in.spec, true);
    for (int t = 0; t < 20; ++t) {
        const BlockVector u = BlockVector::random(3, 6, rng);
        const double s = sys.s_norm(u);
        EXPECT_NEAR(sys.a_norm(sys.apply_P(u)), s, 1e-10 * s);
        EXPECT_NEAR(u.dot(sys.apply_S(u)), std::pow(sys.a_norm(sys.apply_P(u)), 2), 1e-10 * s * s);
    }
}

TEST(Norms, RandomDirectionsNeverExceedSupremum)
{
    std::mt19937_64 rng(11);
    const Instance in = random_instance(rng, 3, 5);
    const TimeGlobalSystem sys(in.spec, true);
    const BlockVector u = BlockVector::random(3, 5, rng);
    const BlockVector bu = sys.apply_B(u);
    const double s = sys.s_norm(u);
    double best = 0.0;
    for (int t = 0; t < 200; ++t) {
        const BlockVector v = BlockVector::random(3, 5, rng);
        best = std::max(best, v.dot(bu) / sys.a_norm(v));
    }
    EXPECT_LE(best, s * (1.0 + 1e-10));
    const BlockVector pu = sys.apply_P(u);
    EXPECT_NEAR(pu.dot(bu) / sys.a_norm(pu), s, 1e-10 * s);
}

TEST(Norms, MaxNormBound)
{
    std::mt19937_64 rng(12);
    const Instance in = random_instance(rng, 3, 6);
    const TimeGlobalSystem sys(in.spec, true);
    for (int t = 0; t < 1000; ++t) {
        const BlockVector u = BlockVector::random(3, 6, rng);
        EXPECT_LE(sys.max_m_norm(u), sys.s_norm(u));
    }
}

TEST(Forms, SIdentity)
{
    std::mt19937_64 rng(13);
    const Instance in = random_instance(rng, 3, 5);
    const TimeGlobalSystem sys(in.spec, true);
    for (int t = 0; t < 10; ++t) {
        const BlockVector u = BlockVector::random(3, 5, rng);
        const BlockVector v = BlockVector::random(3, 5, rng);
        const double lhs = u.dot(sys.apply_S(v));
        const double rhs = sys.s_volume_form(u, v) + sys.jump_form(u, v);
        EXPECT_NEAR(lhs, rhs, 1e-10 * (std::abs(lhs) + sys.s_norm(u) * sys.s_norm(v)));
    }
}

TEST(Forms, JumpFormMatchesDefinition)
{
    std::mt19937_64 rng(14);
    const Instance in = random_instance(rng, 3, 4);
    const TimeGlobalSystem sys(in.spec);
    const Eigen::MatrixXd m = in.spec.mass.to_dense();
    const BlockVector u = BlockVector::random(3, 4, rng);
    const BlockVector v = BlockVector::random(3, 4, rng);
    double expected = u.block(3).dot(m * v.block(3));
    for (Index n = 0; n < 4; ++n) {
        const Eigen::VectorXd du = n == 0 ? Eigen::VectorXd(u.block(0)) : Eigen::VectorXd(u.block(n) - u.block(n - 1));
        const Eigen::VectorXd dv = n == 0 ? Eigen::VectorXd(v.block(0)) : Eigen::VectorXd(v.block(n) - v.block(n - 1));
        expected += du.dot(m * dv);
    }
    EXPECT_NEAR(sys.jump_form(u, v), expected, 1e-13 * (1.0 + std::abs(expected)));
}

TEST(Forms, JumpBound)
{
    std::mt19937_64 rng(15);
    const Instance in = random_instance(rng, 3, 6);
    const TimeGlobalSystem sys(in.spec, true);
    const Eigen::MatrixXd m = in.spec.mass.to_dense();
    for (int t = 0; t < 50; ++t) {
        const BlockVector v = BlockVector::random(3, 6, rng);
        const double j = sys.jump_form(v, v);
        EXPECT_GE(j, 0.0);
        for (double eps : {0.5, 1.0, 2.0}) {
            double bound = 0.0;
            for (Index n = 0; n < 6; ++n) {
                const double tau = in.spec.grid.step(static_cast<int>(n));
                const auto& op = in.spec.stiffness[static_cast<std::size_t>(n)];
                const Eigen::MatrixXd an = op.materialize().to_dense();
                const Eigen::VectorXd d =
                    (n == 0 ? Eigen::VectorXd(v.block(0)) : Eigen::VectorXd(v.block(n) - v.block(n - 1))) / tau;
                const Eigen::VectorXd md = m * d;
                bound += tau * (md.dot(an.ldlt().solve(md)) / eps + eps * v.block(n).dot(an * v.block(n)));
            }
            EXPECT_LE(j, bound * (1.0 + 1e-12));
        }
    }
}

TEST(Forms, SdEquivalence)
{
    std::mt19937_64 rng(16);
    const Instance in = random_instance(rng, 3, 6);
    const TimeGlobalSystem sys(in.spec, true);
    for (int t = 0; t < 50; ++t) {
        const BlockVector v = BlockVector::random(3, 6, rng);
        const double s = std::pow(sys.s_norm(v), 2);
        const double sd = sys.s_D(v, v);
        EXPECT_LE(sd, s * (1.0 + 1e-12));
        EXPECT_LE(s, 3.0 * sd * (1.0 + 1e-12));
    }
}

TEST(Forms, MixedInfSupConstants)
{
    std::mt19937_64 rng(17);
    const double lo = (std::sqrt(5.0) - 1.0) / 2.0;
    const double hi = (std::sqrt(5.0) + 1.0) / 2.0;
    for (int trial = 0; trial < 5; ++trial) {
        const Instance in = random_instance(rng, 2 + trial % 3, 3 + trial);
        const Index n = in.dense.K.rows();
        Eigen::MatrixXd saddle(2 * n, 2 * n);
        saddle << in.dense.A, -in.dense.K, -in.dense.K.transpose(),
            -(in.dense.K + in.dense.K.transpose() + in.dense.A);
        Eigen::MatrixXd d_inv_half = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        auto inv_sqrt = [](const Eigen::MatrixXd& x) {
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
            return es.operatorInverseSqrt();
        };
        d_inv_half.topLeftCorner(n, n) = inv_sqrt(in.dense.A);
        d_inv_half.bottomRightCorner(n, n) = inv_sqrt(in.dense.S);
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(d_inv_half * saddle * d_inv_half);
        EXPECT_GE(svd.singularValues().minCoeff(), lo - 1e-8);
        EXPECT_LE(svd.singularValues().maxCoeff(), hi + 1e-8);
    }
}
