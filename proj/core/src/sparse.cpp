#include "timepar/sparse.hpp"

#include "timepar/errors.hpp"

#include <cmath>
#include <string>

namespace timepar {

SpatialMatrix SpatialMatrix::from_entries(Index dim, std::span<const Entry> entries)
{
    if (dim < 1) {
        throw InputError("SpatialMatrix: dimension must be positive");
    }
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(entries.size());
    for (const auto& e : entries) {
        if (e.row < 0 || e.col < 0 || e.row >= dim || e.col >= dim) {
            throw InputError("SpatialMatrix: entry (" + std::to_string(e.row) + "," +
                             std::to_string(e.col) + ") outside dimension " + std::to_string(dim));
        }
        if (e.row <= e.col) {
            triplets.emplace_back(e.row, e.col, e.value);
        } else {
            triplets.emplace_back(e.col, e.row, e.value);
        }
    }
    Eigen::SparseMatrix<double> upper(dim, dim);
    upper.setFromTriplets(triplets.begin(), triplets.end());
    upper.makeCompressed();
    return SpatialMatrix(std::move(upper));
}

SpatialMatrix SpatialMatrix::identity(Index dim)
{
    return diagonal(SpatialVector::Ones(dim));
}

SpatialMatrix SpatialMatrix::diagonal(const SpatialVector& diag)
{
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(diag.size()));
    for (Index i = 0; i < diag.size(); ++i) {
        entries.push_back({i, i, diag[i]});
    }
    return from_entries(diag.size(), entries);
}

SpatialMatrix SpatialMatrix::from_dense(const Eigen::MatrixXd& dense)
{
    if (dense.rows() != dense.cols()) {
        throw DimensionError("SpatialMatrix::from_dense: matrix is not square");
    }
    std::vector<Entry> entries;
    for (Index j = 0; j < dense.cols(); ++j) {
        for (Index i = 0; i <= j; ++i) {
            if (dense(i, j) != 0.0) {
                entries.push_back({i, j, dense(i, j)});
            }
        }
    }
    return from_entries(dense.rows(), entries);
}

SpatialMatrix SpatialMatrix::combine(double a, const SpatialMatrix& x, double b, const SpatialMatrix& y)
{
    if (x.dim() != y.dim()) {
        throw DimensionError("SpatialMatrix::combine: dimension mismatch");
    }
    Eigen::SparseMatrix<double> sum = a * x.upper_ + b * y.upper_;
    sum.makeCompressed();
    return SpatialMatrix(std::move(sum));
}

void SpatialMatrix::multiply(ConstVectorRef in, VectorRef out) const
{
    out.noalias() = upper_.selfadjointView<Eigen::Upper>() * in;
}

SpatialVector SpatialMatrix::diagonal_entries() const
{
    return upper_.diagonal();
}

Eigen::MatrixXd SpatialMatrix::to_dense() const
{
    Eigen::MatrixXd dense = Eigen::MatrixXd(upper_);
    dense.triangularView<Eigen::StrictlyLower>() = dense.transpose().triangularView<Eigen::StrictlyLower>();
    return dense;
}

std::vector<Entry> SpatialMatrix::upper_entries() const
{
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(upper_.nonZeros()));
    for (Index j = 0; j < upper_.outerSize(); ++j) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(upper_, j); it; ++it) {
            entries.push_back({it.row(), it.col(), it.value()});
        }
    }
    return entries;
}

double SpatialMatrix::frobenius_norm() const
{
    double sum = 0.0;
    for (const auto& e : upper_entries()) {
        sum += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
    }
    return std::sqrt(sum);
}

SpatialMatrix SpatialMatrix::scaled(double factor) const
{
    Eigen::SparseMatrix<double> s = factor * upper_;
    return SpatialMatrix(std::move(s));
}

Eigen::SparseMatrix<double> SpatialMatrix::full() const
{
    Eigen::SparseMatrix<double> f = upper_.selfadjointView<Eigen::Upper>();
    return f;
}

SpatialVector spmv(const SpatialMatrix& op, const SpatialVector& x)
{
    if (op.dim() != x.size()) {
        throw DimensionError("spmv: operator dimension " + std::to_string(op.dim()) +
                             " does not match vector dimension " + std::to_string(x.size()));
    }
    SpatialVector y(x.size());
    op.multiply(x, y);
    return y;
}

double weighted_norm(const SpatialMatrix& op, const SpatialVector& x)
{
    const SpatialVector lx = spmv(op, x);
    const double q = x.dot(lx);
    if (q < 0.0) {
        if (q < -1e-14 * x.squaredNorm()) {
            throw NonSpdError("weighted_norm: negative quadratic form " + std::to_string(q));
        }
        return 0.0;
    }
    return std::sqrt(q);
}

CholeskyFactor::CholeskyFactor(const SpatialMatrix& op) : dim_(op.dim())
{
    auto llt = std::make_shared<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Upper>>();
    llt->compute(op.upper());
    if (llt->info() != Eigen::Success) {
        throw NonSpdError("CholeskyFactor: non-positive pivot, operator is not SPD");
    }
    llt_ = std::move(llt);
}

SpatialVector CholeskyFactor::solve(const SpatialVector& b) const
{
    if (b.size() != dim_) {
        throw DimensionError("CholeskyFactor::solve: dimension mismatch");
    }
    SpatialVector x(dim_);
    solve(b, x);
    return x;
}

void CholeskyFactor::solve(ConstVectorRef b, VectorRef x) const
{
    x = llt_->solve(b);
}

SpatialVector cholesky_solve(const SpatialMatrix& op, const SpatialVector& b)
{
    return CholeskyFactor(op).solve(b);
}

}  // namespace timepar
