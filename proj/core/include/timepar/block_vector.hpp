#pragma once

#include "timepar/sparse.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <random>

namespace timepar {

/// Element of V^N: one spatial vector per time step.
///
/// Stored as a dim x N column-major matrix so block n is contiguous.
/// Time indices are zero-based in code (block 0 holds u_1).
class BlockVector {
public:
    BlockVector() = default;
    BlockVector(Index dim, Index steps);

    static BlockVector zeros(Index dim, Index steps) { return BlockVector(dim, steps); }
    /// Entries iid uniform in [-1, 1].
    static BlockVector random(Index dim, Index steps, std::mt19937_64& rng);

    Index dim() const { return data_.rows(); }
    Index steps() const { return data_.cols(); }
    Index size() const { return data_.size(); }

    auto block(Index n) { return data_.col(n); }
    auto block(Index n) const { return data_.col(n); }

    Eigen::MatrixXd& data() { return data_; }
    const Eigen::MatrixXd& data() const { return data_; }

    void set_zero() { data_.setZero(); }
    bool same_shape(const BlockVector& other) const
    {
        return dim() == other.dim() && steps() == other.steps();
    }

    BlockVector& operator+=(const BlockVector& other);
    BlockVector& operator-=(const BlockVector& other);
    BlockVector& operator*=(double factor);
    /// this += factor * other
    BlockVector& axpy(double factor, const BlockVector& other);

    /// Euclidean inner product; blocks are summed in order so the result does
    /// not depend on the thread count.
    double dot(const BlockVector& other) const;
    double norm() const;

private:
    Eigen::MatrixXd data_;
};

BlockVector operator+(BlockVector a, const BlockVector& b);
BlockVector operator-(BlockVector a, const BlockVector& b);
BlockVector operator*(double factor, BlockVector a);

/// Throws DimensionError unless a and b share dim and N.
void require_same_shape(const BlockVector& a, const BlockVector& b, const char* where);

/// [p, u] in V^N x V^N.
struct SaddleVector {
    BlockVector p;
    BlockVector u;

    SaddleVector() = default;
    SaddleVector(Index dim, Index steps) : p(dim, steps), u(dim, steps) {}
    SaddleVector(BlockVector p_in, BlockVector u_in);

    Index dim() const { return u.dim(); }
    Index steps() const { return u.steps(); }

    double dot(const SaddleVector& other) const { return p.dot(other.p) + u.dot(other.u); }
    SaddleVector& axpy(double factor, const SaddleVector& other);
    SaddleVector& operator*=(double factor);
};

}  // namespace timepar
