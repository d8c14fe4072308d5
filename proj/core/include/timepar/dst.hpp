#pragma once

#include "timepar/block_vector.hpp"

#include <memory>
#include <span>

namespace timepar {

enum class DstPath {
    automatic,  ///< FFT for power-of-two N, direct summation otherwise
    naive,      ///< always the O(N^2) summation
};

/// Discrete sine transforms over the time index of a BlockVector.
///
/// With s_kn = sin((2k-1) n pi / (2N)) and w_n = 1 except w_N = 1/2:
///     forward  (type III)  u^_k = (2/N) sum_n w_n s_kn u_n
///     inverse  (type II)   u_n  = sum_k s_kn u^_k
/// together with the exact transposes of both matrices. Every transform
/// acts independently on each spatial component, so a BlockVector of
/// dimension d costs d transforms of length N.
///
/// Plans are immutable and may be shared between threads. Input and output
/// may alias.
class DstPlan {
public:
    explicit DstPlan(Index length, DstPath path = DstPath::automatic);
    ~DstPlan();
    DstPlan(DstPlan&&) noexcept;
    DstPlan& operator=(DstPlan&&) noexcept;
    DstPlan(const DstPlan&) = delete;
    DstPlan& operator=(const DstPlan&) = delete;

    Index length() const { return length_; }
    bool fast() const { return fast_; }

    void forward(const BlockVector& in, BlockVector& out) const;
    void inverse(const BlockVector& in, BlockVector& out) const;
    void forward_transpose(const BlockVector& in, BlockVector& out) const;
    void inverse_transpose(const BlockVector& in, BlockVector& out) const;

    BlockVector forward(const BlockVector& in) const;
    BlockVector inverse(const BlockVector& in) const;
    BlockVector forward_transpose(const BlockVector& in) const;
    BlockVector inverse_transpose(const BlockVector& in) const;

    /// Scalar sequences (dim V = 1).
    void forward(std::span<const double> in, std::span<double> out) const;
    void inverse(std::span<const double> in, std::span<double> out) const;
    void forward_transpose(std::span<const double> in, std::span<double> out) const;
    void inverse_transpose(std::span<const double> in, std::span<double> out) const;

private:
    enum class Op { forward, inverse, forward_transpose, inverse_transpose };
    struct Impl;

    void apply(Op op, const Eigen::MatrixXd& in, Eigen::MatrixXd& out) const;

    Index length_ = 0;
    bool fast_ = false;
    std::unique_ptr<Impl> impl_;
};

/// mu_k = 2 sin((2k-1) pi / (4N)) for k = 1..N (stored zero-based).
Eigen::VectorXd dst_frequencies(Index length);

}  // namespace timepar
