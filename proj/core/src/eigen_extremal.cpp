#include "timepar/eigen_extremal.hpp"

#include "timepar/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace timepar {

Eigen::VectorXd dense_generalized_eigenvalues(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                              Index dense_limit)
{
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
        throw DimensionError("dense_generalized_eig: matrices must be square and of equal size");
    }
    if (a.rows() > dense_limit) {
        throw DenseLimitExceeded("dense_generalized_eig: dimension " + std::to_string(a.rows()) +
                                 " exceeds dense limit " + std::to_string(dense_limit) +
                                 "; use lanczos_extremal_eig");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(b);
    if (llt.info() != Eigen::Success) {
        throw NonSpdError("dense_generalized_eig: right-hand matrix is not SPD");
    }
    // Reduce to L^{-1} A L^{-T} explicitly so the SPD check above is the one
    // that decides; the result is symmetrized against rounding.
    Eigen::MatrixXd c = llt.matrixL().solve(a);
    c = llt.matrixL().solve(c.transpose()).eval();
    c = 0.5 * (c + c.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("dense_generalized_eig: eigen-solver did not converge");
    }
    return es.eigenvalues();
}

ExtremalEigenvalues dense_generalized_eig_extremal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                                   Index dense_limit)
{
    const Eigen::VectorXd ev = dense_generalized_eigenvalues(a, b, dense_limit);
    return {ev.minCoeff(), ev.maxCoeff()};
}

namespace {

struct RitzSummary {
    double min;
    double max;
    double min_residual;
    double max_residual;
};

RitzSummary ritz_summary(const std::vector<double>& alpha, const std::vector<double>& beta, double beta_last)
{
    const auto m = static_cast<Index>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub(std::max<Index>(m - 1, 0));
    for (Index i = 0; i + 1 < m; ++i) {
        sub[i] = beta[static_cast<std::size_t>(i)];
    }
    if (m == 1) {
        return {diag[0], diag[0], std::abs(beta_last), std::abs(beta_last)};
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const auto& vals = es.eigenvalues();
    const auto& vecs = es.eigenvectors();
    return {vals[0], vals[m - 1], std::abs(beta_last * vecs(m - 1, 0)),
            std::abs(beta_last * vecs(m - 1, m - 1))};
}

}  // namespace

LanczosResult lanczos_extremal_eig(const BlockOperator& op, const BlockOperator& inner, BlockVector start,
                                   const LanczosOptions& options)
{
    if (options.max_iterations < 1) {
        throw InputError("lanczos_extremal_eig: max_iterations must be >= 1");
    }
    const Index dim = start.dim();
    const Index steps = start.steps();

    BlockVector bq(dim, steps);
    inner(start, bq);
    const double start_norm_sq = start.dot(bq);
    if (!(start_norm_sq > 0.0)) {
        throw NonSpdError("lanczos_extremal_eig: start vector has non-positive inner-product norm");
    }
    const double start_norm = std::sqrt(start_norm_sq);
    BlockVector q = std::move(start);
    q *= 1.0 / start_norm;
    bq *= 1.0 / start_norm;

    std::vector<BlockVector> basis;
    std::vector<BlockVector> basis_inner;
    BlockVector q_prev;

    std::vector<double> alpha;
    std::vector<double> beta;
    BlockVector w(dim, steps);
    BlockVector bw(dim, steps);

    LanczosResult result;
    double scale = 0.0;
    for (int j = 0; j < options.max_iterations; ++j) {
        op(q, w);
        const double a = w.dot(bq);
        alpha.push_back(a);
        scale = std::max(scale, std::abs(a));
        w.axpy(-a, q);
        if (j > 0) {
            w.axpy(-beta.back(), q_prev);
        }
        if (options.reorthogonalize) {
            // Two passes of classical Gram-Schmidt in the inner product.
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t i = 0; i < basis.size(); ++i) {
                    w.axpy(-w.dot(basis_inner[i]), basis[i]);
                }
                w.axpy(-w.dot(bq), q);
            }
        }
        inner(w, bw);
        const double b_sq = w.dot(bw);
        const double b = b_sq > 0.0 ? std::sqrt(b_sq) : 0.0;
        scale = std::max(scale, b);
        result.iterations = j + 1;

        const bool breakdown = b <= 1e-13 * std::max(scale, 1e-300);
        const bool last = j + 1 == options.max_iterations;
        const bool check = breakdown || last ||
                           (options.tolerance > 0.0 && (j + 1) % std::max(options.check_every, 1) == 0);
        if (check) {
            const RitzSummary s = ritz_summary(alpha, beta, breakdown ? 0.0 : b);
            result.min = s.min;
            result.max = s.max;
            result.min_residual = s.min_residual;
            result.max_residual = s.max_residual;
            result.converged = breakdown || (options.tolerance > 0.0 &&
                                             s.min_residual <= options.tolerance * std::abs(s.min) &&
                                             s.max_residual <= options.tolerance * std::abs(s.max));
            if (breakdown) {
                result.breakdown = true;
                return result;
            }
            if (result.converged || last) {
                return result;
            }
        }

        beta.push_back(b);
        if (options.reorthogonalize) {
            basis.push_back(q);
            basis_inner.push_back(bq);
        }
        q_prev = std::move(q);
        q = w;
        q *= 1.0 / b;
        bq = bw;
        bq *= 1.0 / b;
    }
    return result;
}

}  // namespace timepar
