#pragma once

#include "timepar/block_vector.hpp"

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace timepar {

/// Largest dimension accepted by the dense generalized eigen-solver.
inline constexpr Index kDefaultDenseLimit = 20000;

struct ExtremalEigenvalues {
    double min = 0.0;
    double max = 0.0;
};

/// Extremal eigenvalues of the symmetric-definite pencil A x = lambda B x.
///
/// Throws NonSpdError if B is not SPD and DenseLimitExceeded if the
/// dimension is above dense_limit (use lanczos_extremal_eig instead).
ExtremalEigenvalues dense_generalized_eig_extremal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                                   Index dense_limit = kDefaultDenseLimit);

/// All eigenvalues of the pencil, ascending. Same preconditions as above.
Eigen::VectorXd dense_generalized_eigenvalues(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                              Index dense_limit = kDefaultDenseLimit);

/// out = Op(in). Must not alias.
using BlockOperator = std::function<void(const BlockVector& in, BlockVector& out)>;

struct LanczosOptions {
    int max_iterations = 100;
    /// Stop once both extremal Ritz pairs have residual bound <= tolerance*|theta|.
    /// Zero runs all max_iterations.
    double tolerance = 0.0;
    /// Full re-orthogonalization against every stored Lanczos vector.
    bool reorthogonalize = true;
    /// How often (in iterations) the tridiagonal is re-diagonalized for the
    /// convergence test.
    int check_every = 5;
};

struct LanczosResult {
    double min = 0.0;
    double max = 0.0;
    int iterations = 0;
    bool breakdown = false;
    bool converged = false;
    /// Residual bounds of the extremal Ritz pairs at exit.
    double min_residual = 0.0;
    double max_residual = 0.0;
};

/// Ritz estimates of the extremal eigenvalues of `op`, which must be
/// self-adjoint in the inner product <x, y> = x . inner(y) (inner SPD).
///
/// The extremal Ritz values move outward monotonically with the iteration
/// count. On breakdown (invariant Krylov space) the current Ritz values are
/// returned with breakdown = true; they are then exact.
LanczosResult lanczos_extremal_eig(const BlockOperator& op, const BlockOperator& inner, BlockVector start,
                                   const LanczosOptions& options);

}  // namespace timepar
