#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <memory>
#include <span>
#include <vector>

namespace timepar {

using Index = Eigen::Index;

/// Coefficients of an element of the spatial space V.
using SpatialVector = Eigen::VectorXd;

using VectorRef = Eigen::Ref<Eigen::VectorXd>;
using ConstVectorRef = Eigen::Ref<const Eigen::VectorXd>;

struct Entry {
    Index row;
    Index col;
    double value;
};

/// Sparse symmetric operator on V.
///
/// Only the upper triangle is stored; entries handed in below the diagonal
/// are mirrored into it, duplicates are summed. Symmetry therefore holds by
/// construction.
class SpatialMatrix {
public:
    SpatialMatrix() = default;

    static SpatialMatrix from_entries(Index dim, std::span<const Entry> entries);
    static SpatialMatrix identity(Index dim);
    static SpatialMatrix diagonal(const SpatialVector& diag);
    /// Uses the upper triangle of a dense symmetric matrix.
    static SpatialMatrix from_dense(const Eigen::MatrixXd& dense);
    /// a*x + b*y, same sparsity union.
    static SpatialMatrix combine(double a, const SpatialMatrix& x, double b, const SpatialMatrix& y);

    Index dim() const { return upper_.rows(); }
    Index nonzeros() const { return upper_.nonZeros(); }
    const Eigen::SparseMatrix<double>& upper() const { return upper_; }

    /// out = L * in. No dimension checks; use spmv() at API boundaries.
    void multiply(ConstVectorRef in, VectorRef out) const;
    SpatialVector diagonal_entries() const;
    Eigen::MatrixXd to_dense() const;
    std::vector<Entry> upper_entries() const;
    double frobenius_norm() const;
    SpatialMatrix scaled(double factor) const;
    /// Full (both triangles) sparse representation.
    Eigen::SparseMatrix<double> full() const;

private:
    explicit SpatialMatrix(Eigen::SparseMatrix<double> upper) : upper_(std::move(upper)) {}

    Eigen::SparseMatrix<double> upper_;
};

/// Returns L x; throws DimensionError on mismatch.
SpatialVector spmv(const SpatialMatrix& op, const SpatialVector& x);

/// sqrt(x' L x) for SPD L. Throws NonSpdError when the quadratic form is
/// negative beyond rounding (-1e-14 * |x|^2).
double weighted_norm(const SpatialMatrix& op, const SpatialVector& x);

/// Sparse Cholesky factorization of an SPD SpatialMatrix.
///
/// Immutable after construction; solve() may be called concurrently.
class CholeskyFactor {
public:
    explicit CholeskyFactor(const SpatialMatrix& op);

    Index dim() const { return dim_; }
    SpatialVector solve(const SpatialVector& b) const;
    void solve(ConstVectorRef b, VectorRef x) const;

private:
    Index dim_ = 0;
    std::shared_ptr<const Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Upper>> llt_;
};

/// One-shot SPD solve; residual |Lx - b| <= 1e-12 |b| on well-conditioned input.
SpatialVector cholesky_solve(const SpatialMatrix& op, const SpatialVector& b);

}  // namespace timepar
