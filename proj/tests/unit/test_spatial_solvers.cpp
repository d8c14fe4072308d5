#include "test_support.hpp"

#include "timepar/eigen_extremal.hpp"
#include "timepar/errors.hpp"
#include "timepar/spatial_solvers.hpp"

#include <gtest/gtest.h>

using namespace timepar;
using namespace timepar::testing;

namespace {

/// W^{-1} = theta L^{-1}, so W = L / theta.
class ScaledExact final : public SpatialSolver {
public:
    ScaledExact(const SpatialMatrix& target, double theta) : inner_(target), theta_(theta) {}

    Index dim() const override { return inner_.dim(); }
    void apply_inverse(ConstVectorRef b, VectorRef x) const override
    {
        inner_.apply_inverse(b, x);
        x *= theta_;
    }
    std::string describe() const override { return "scaled"; }

private:
    DirectSolver inner_;
    double theta_;
};

Eigen::MatrixXd dense_inverse(const SpatialSolver& s)
{
    const Index n = s.dim();
    Eigen::MatrixXd w(n, n);
    for (Index j = 0; j < n; ++j) {
        w.col(j) = s.apply_inverse(SpatialVector(SpatialVector::Unit(n, j)));
    }
    return w;
}

/// ||I - W^{-1} L||_L from the eigenvalues of the pencil (L, W).
double dense_rho(const SpatialMatrix& target, const SpatialSolver& s)
{
    const Eigen::MatrixXd winv = dense_inverse(s);
    const Eigen::MatrixXd w = Eigen::MatrixXd(0.5 * (winv + winv.transpose())).inverse();
    const Eigen::VectorXd lam =
        dense_generalized_eigenvalues(target.to_dense(), Eigen::MatrixXd(0.5 * (w + w.transpose())), 5000);
    return (1.0 - lam.array()).abs().maxCoeff();
}

SpatialVector random_vector(Index n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    SpatialVector v(n);
    for (Index i = 0; i < n; ++i) {
        v[i] = g(rng);
    }
    return v;
}

std::unique_ptr<SpatialSolver> mg_with_smoothing(const SpatialMatrix& target,
                                                 std::shared_ptr<const MgHierarchy> hierarchy, int smoothing)
{
    SolverConfig c;
    c.kind = SolverKind::mg;
    c.smoothing = smoothing;
    return make_spatial_solver(target, c, std::move(hierarchy));
}

}  // namespace

TEST(DirectSolver, IdentityReturnsInput)
{
    const DirectSolver s(SpatialMatrix::identity(4));
    const SpatialVector b = (SpatialVector(4) << 1, -2, 3, 0.5).finished();
    EXPECT_LT((s.apply_inverse(b) - b).norm(), 1e-15);
    EXPECT_LT((s.apply_forward(b) - b).norm(), 1e-15);
    EXPECT_TRUE(s.exact());
}

TEST(JacobiSolver, OneUndampedSweepInvertsADiagonal)
{
    const SpatialVector d = (SpatialVector(3) << 2, 4, 8).finished();
    const JacobiSolver s(SpatialMatrix::diagonal(d), 1, 1.0);
    const SpatialVector x = s.apply_inverse(SpatialVector(SpatialVector::Ones(3)));
    EXPECT_DOUBLE_EQ(x[0], 0.5);
    EXPECT_DOUBLE_EQ(x[1], 0.25);
    EXPECT_DOUBLE_EQ(x[2], 0.125);
}

TEST(JacobiSolver, ForwardInvertsApplyInverse)
{
    const auto ms = assemble_mass_stiffness_1d(16);
    const JacobiSolver s(ms.stiffness, 2, 2.0 / 3.0);
    std::mt19937_64 rng(1);
    const SpatialVector x = random_vector(15, rng);
    EXPECT_LT((s.apply_inverse(s.apply_forward(x)) - x).norm(), 1e-8 * x.norm());
}

TEST(MgHierarchy, FourCellsGiveTwoLevels)
{
    const auto h = build_mg_hierarchy(SpaceDim::one, 4);
    EXPECT_EQ(h->levels(), 2);
    EXPECT_EQ(h->dim(0), 3);
    EXPECT_EQ(h->dim(1), 1);
    const auto h2 = build_mg_hierarchy(SpaceDim::two, 16);
    EXPECT_EQ(h2->levels(), 4);
    EXPECT_EQ(h2->dim(0), 225);
    EXPECT_EQ(h2->dim(3), 1);
}

TEST(MgHierarchy, RejectsInvalidSizes)
{
    EXPECT_THROW(build_mg_hierarchy(SpaceDim::one, 12), InputError);
    EXPECT_THROW(build_mg_hierarchy(SpaceDim::one, 2), InputError);
}

TEST(MgHierarchy, GalerkinLevelsMatchProlongationProducts)
{
    for (SpaceDim space : {SpaceDim::one, SpaceDim::two}) {
        const auto h = build_mg_hierarchy(space, 16);
        const auto ms = space == SpaceDim::one ? assemble_mass_stiffness_1d(16) : assemble_mass_stiffness_2d(16);
        const auto levels = h->galerkin_levels(ms.stiffness);
        ASSERT_EQ(static_cast<int>(levels.size()), h->levels());
        for (int l = 0; l + 1 < h->levels(); ++l) {
            const Eigen::MatrixXd p(h->prolongation(l));
            const Eigen::MatrixXd expect = p.transpose() * levels[static_cast<std::size_t>(l)].to_dense() * p;
            EXPECT_LT((levels[static_cast<std::size_t>(l) + 1].to_dense() - expect).norm(), 1e-12 * expect.norm());
        }
    }
}

TEST(MgHierarchy, GalerkinStiffnessEqualsCoarseAssembly)
{
    for (SpaceDim space : {SpaceDim::one, SpaceDim::two}) {
        const auto h = build_mg_hierarchy(space, 16);
        const auto coarse = space == SpaceDim::one ? assemble_mass_stiffness_1d(8) : assemble_mass_stiffness_2d(8);
        EXPECT_LT((h->stiffness_levels()[1].to_dense() - coarse.stiffness.to_dense()).norm(), 1e-10);
        EXPECT_LT((h->mass_levels()[1].to_dense() - coarse.mass.to_dense()).norm(), 1e-12);
    }
}

TEST(MgHierarchy, ProlongationInterpolatesPiecewiseLinearFunctions)
{
    const auto h = build_mg_hierarchy(SpaceDim::one, 8);
    SpatialVector coarse(3);
    for (Index j = 0; j < 3; ++j) {
        const double x = 0.25 * static_cast<double>(j + 1);
        coarse[j] = std::min(x, 1.0 - x);
    }
    const SpatialVector fine = h->prolongation(0) * coarse;
    for (Index i = 0; i < 7; ++i) {
        const double x = 0.125 * static_cast<double>(i + 1);
        EXPECT_NEAR(fine[i], std::min(x, 1.0 - x), 1e-15);
    }
}

TEST(MgVcycle, EnergyContractionOnPoisson1d)
{
    const auto ms = assemble_mass_stiffness_1d(64);
    const auto h = build_mg_hierarchy(SpaceDim::one, 64);
    const auto s = mg_with_smoothing(ms.stiffness, h, 1);
    EXPECT_LT(dense_rho(ms.stiffness, *s), 0.2);
}

TEST(MgVcycle, IsLinear)
{
    const auto ms = assemble_mass_stiffness_2d(16);
    const auto s = make_spatial_solver(ms.stiffness, parse_solver_config("mg"), build_mg_hierarchy(SpaceDim::two, 16));
    std::mt19937_64 rng(2);
    const SpatialVector x = random_vector(225, rng);
    const SpatialVector y = random_vector(225, rng);
    const SpatialVector lhs = s->apply_inverse(SpatialVector(2.0 * x - 3.0 * y));
    const SpatialVector rhs = 2.0 * s->apply_inverse(x) - 3.0 * s->apply_inverse(y);
    EXPECT_LT((lhs - rhs).norm(), 1e-13 * rhs.norm());
}

TEST(MgVcycle, IsSelfAdjointAndPositive)
{
    const auto ms = assemble_mass_stiffness_2d(16);
    const SpatialMatrix target = SpatialMatrix::combine(1.3, ms.mass, 0.01, ms.stiffness);
    const auto s = make_spatial_solver(target, parse_solver_config("mg"), build_mg_hierarchy(SpaceDim::two, 16));
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        const SpatialVector x = random_vector(225, rng);
        const SpatialVector y = random_vector(225, rng);
        const double a = x.dot(s->apply_inverse(y));
        const double b = y.dot(s->apply_inverse(x));
        EXPECT_NEAR(a, b, 1e-13 * std::max(std::abs(a), 1.0));
    }
    for (int t = 0; t < 1000; ++t) {
        const SpatialVector x = random_vector(225, rng);
        EXPECT_GT(x.dot(s->apply_inverse(x)), 0.0);
    }
}

TEST(RhoA, DirectIsZero)
{
    const auto ms = assemble_mass_stiffness_1d(16);
    const DirectSolver s(ms.stiffness);
    EXPECT_LT(estimate_rho_A(ms.stiffness, s).value, 1e-12);
}

TEST(RhoA, ScaledExactSolver)
{
    const auto ms = assemble_mass_stiffness_1d(16);
    for (double theta : {0.5, 0.9, 1.2}) {
        const ScaledExact s(ms.stiffness, theta);
        const RhoEstimate r = estimate_rho_A(ms.stiffness, s);
        EXPECT_NEAR(r.value, std::abs(1.0 - theta), 1e-12) << theta;
        EXPECT_TRUE(r.convergent);
    }
    const ScaledExact bad(ms.stiffness, 2.5);
    EXPECT_FALSE(estimate_rho_A(ms.stiffness, bad).convergent);
}

TEST(RhoA, MultigridMatchesDenseOracle)
{
    const auto ms = assemble_mass_stiffness_1d(128);
    const auto s = mg_with_smoothing(ms.stiffness, build_mg_hierarchy(SpaceDim::one, 128), 1);
    const double exact = dense_rho(ms.stiffness, *s);
    const RhoEstimate r = estimate_rho_A(ms.stiffness, *s, 400);
    EXPECT_LE(r.value, exact + 1e-10);
    EXPECT_NEAR(r.value, exact, 1e-6);
}

TEST(RhoA, DecreasesWithSmoothing)
{
    const auto ms = assemble_mass_stiffness_1d(64);
    const auto h = build_mg_hierarchy(SpaceDim::one, 64);
    double prev = 1.0;
    for (int nu = 1; nu <= 4; ++nu) {
        const double rho = dense_rho(ms.stiffness, *mg_with_smoothing(ms.stiffness, h, nu));
        EXPECT_LE(rho, prev + 1e-12) << nu;
        prev = rho;
    }
}

TEST(RhoA, StepPreconditionerTakesLargestBase)
{
    std::mt19937_64 rng(4);
    const ProblemSpec spec = random_problem(6, uniform_nodes(6, 0.1), rng);
    const StepPreconditioner direct(spec, SolverConfig{});
    EXPECT_EQ(direct.distinct_bases(), 2u);
    EXPECT_LT(estimate_rho_A(direct).value, 1e-10);
    const StepPreconditioner jacobi(spec, parse_solver_config("jacobi:3"));
    double worst = 0.0;
    for (std::size_t i = 0; i < jacobi.distinct_bases(); ++i) {
        worst = std::max(worst, estimate_rho_A(jacobi.base(i), jacobi.base_solver(i)).value);
    }
    EXPECT_NEAR(estimate_rho_A(jacobi).value, worst, 1e-12);
}

TEST(GammaGamma, DirectGivesOne)
{
    const auto ms = assemble_mass_stiffness_1d(16);
    const SpatialMatrix hk = SpatialMatrix::combine(0.7, ms.mass, 0.01, ms.stiffness);
    const DirectSolver s(hk);
    const GammaEstimate g = estimate_gamma_Gamma(hk, s, ms.stiffness);
    EXPECT_NEAR(g.gamma, 1.0, 1e-10);
    EXPECT_NEAR(g.Gamma, 1.0, 1e-10);
}

TEST(GammaGamma, ScaledSolvers)
{
    const auto ms = assemble_mass_stiffness_1d(16);
    const SpatialMatrix hk = SpatialMatrix::combine(0.7, ms.mass, 0.01, ms.stiffness);
    // W^{-1} = H^{-1}/2, i.e. H~ = 2H: pencil eigenvalue 1/4.
    const ScaledExact doubled(hk, 0.5);
    const GammaEstimate a = estimate_gamma_Gamma(hk, doubled, ms.stiffness);
    EXPECT_NEAR(a.gamma, 0.25, 1e-10);
    EXPECT_NEAR(a.Gamma, 0.25, 1e-10);
    // H~ = H/2: pencil eigenvalue 4.
    const ScaledExact halved(hk, 2.0);
    const GammaEstimate b = estimate_gamma_Gamma(hk, halved, ms.stiffness, 0);
    EXPECT_FALSE(b.dense);
    EXPECT_NEAR(b.gamma, 4.0, 1e-8);
    EXPECT_NEAR(b.Gamma, 4.0, 1e-8);
}

TEST(GammaGamma, MultigridLanczosMatchesDenseOracle)
{
    const auto ms = assemble_mass_stiffness_2d(16);
    const SpatialMatrix hk = SpatialMatrix::combine(0.3, ms.mass, 1.0 / 64.0, ms.stiffness);
    const auto s = make_spatial_solver(hk, parse_solver_config("mg"), build_mg_hierarchy(SpaceDim::two, 16));
    const Eigen::MatrixXd h = hk.to_dense();
    const Eigen::MatrixXd a = ms.stiffness.to_dense();
    const Eigen::MatrixXd winv = dense_inverse(*s);
    const Eigen::MatrixXd ht = Eigen::MatrixXd(0.5 * (winv + winv.transpose())).inverse();
    const Eigen::MatrixXd x = h * a.ldlt().solve(h);
    const Eigen::MatrixXd y = ht * a.ldlt().solve(ht);
    const auto exact = dense_generalized_eig_extremal(0.5 * (x + x.transpose()), 0.5 * (y + y.transpose()), 5000);
    const GammaEstimate lanczos = estimate_gamma_Gamma(hk, *s, ms.stiffness, 0, 400);
    EXPECT_NEAR(lanczos.gamma, exact.min, 1e-6 * exact.max);
    EXPECT_NEAR(lanczos.Gamma, exact.max, 1e-6 * exact.max);
    const GammaEstimate dense = estimate_gamma_Gamma(hk, *s, ms.stiffness);
    EXPECT_TRUE(dense.dense);
    EXPECT_NEAR(dense.gamma, exact.min, 1e-8 * exact.max);
    EXPECT_NEAR(dense.Gamma, exact.max, 1e-8 * exact.max);
}

TEST(SolverConfig, Parse)
{
    EXPECT_EQ(parse_solver_config("direct").kind, SolverKind::direct);
    const SolverConfig j = parse_solver_config("jacobi:3");
    EXPECT_EQ(j.kind, SolverKind::jacobi);
    EXPECT_EQ(j.sweeps, 3);
    const SolverConfig m = parse_solver_config("mg:2");
    EXPECT_EQ(m.kind, SolverKind::mg);
    EXPECT_EQ(m.vcycles, 2);
    EXPECT_EQ(to_string(m), "mg:2");
    EXPECT_EQ(to_string(parse_solver_config("mg")), "mg:1");
    for (const char* bad : {"", "cg", "mg:0", "mg:x", "jacobi:-1", "direct:2", "mg:2x"}) {
        EXPECT_THROW(parse_solver_config(bad), InputError) << bad;
    }
}

TEST(SolverConfig, MgNeedsMatchingHierarchy)
{
    const auto ms = assemble_mass_stiffness_1d(16);
    EXPECT_THROW(make_spatial_solver(ms.stiffness, parse_solver_config("mg")), InputError);
    EXPECT_THROW(make_spatial_solver(ms.stiffness, parse_solver_config("mg"), build_mg_hierarchy(SpaceDim::one, 8)),
                 DimensionError);
}
