#include "timepar/dst.hpp"

#include "timepar/errors.hpp"
#include "timepar/parallel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

namespace timepar {

namespace {

// FFTW's planner is not re-entrant; execution with the new-array interface is.
std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

bool is_power_of_two(Index n)
{
    return n > 0 && (n & (n - 1)) == 0;
}

// sin(pi * m / (2N)) with the argument reduced modulo 4N first.
double half_sample_sine(Index m, Index length)
{
    const Index period = 4 * length;
    m %= period;
    return std::sin(std::numbers::pi * static_cast<double>(m) / static_cast<double>(2 * length));
}

}  // namespace

struct DstPlan::Impl {
    // Unnormalized kernels in FFTW's convention:
    //   R01(x)_k = (-1)^k x_{N-1} + 2 sum_{j<N-1} x_j sin(pi (j+1)(2k+1) / 2N)
    //   R10(x)_k = 2 sum_j x_j sin(pi (2j+1)(k+1) / 2N)
    fftw_plan r01 = nullptr;
    fftw_plan r10 = nullptr;
    // Naive path: the four transforms as dense N x N matrices.
    Eigen::MatrixXd dense[4];
    // Fast path: diagonal scalings around the kernel, per op.
    Eigen::VectorXd pre[4];
    Eigen::VectorXd post[4];

    ~Impl()
    {
        std::lock_guard lock(fftw_planner_mutex());
        if (r01) {
            fftw_destroy_plan(r01);
        }
        if (r10) {
            fftw_destroy_plan(r10);
        }
    }
};

DstPlan::DstPlan(Index length, DstPath path)
    : length_(length), fast_(path == DstPath::automatic && is_power_of_two(length)), impl_(std::make_unique<Impl>())
{
    if (length < 1) {
        throw InputError("DstPlan: length must be >= 1, got " + std::to_string(length));
    }
    const Index n = length;
    const double inv_n = 1.0 / static_cast<double>(n);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd last_half = ones;
    last_half[n - 1] = 0.5;
    Eigen::VectorXd halves_but_last = 0.5 * ones;
    halves_but_last[n - 1] = 1.0;

    auto& pre = impl_->pre;
    auto& post = impl_->post;
    pre[static_cast<int>(Op::forward)] = ones;
    post[static_cast<int>(Op::forward)] = inv_n * ones;
    pre[static_cast<int>(Op::inverse)] = ones;
    post[static_cast<int>(Op::inverse)] = 0.5 * ones;
    pre[static_cast<int>(Op::forward_transpose)] = ones;
    post[static_cast<int>(Op::forward_transpose)] = inv_n * last_half;
    pre[static_cast<int>(Op::inverse_transpose)] = halves_but_last;
    post[static_cast<int>(Op::inverse_transpose)] = ones;

    if (fast_) {
        std::vector<double> a(static_cast<std::size_t>(n));
        std::vector<double> b(static_cast<std::size_t>(n));
        const int len = static_cast<int>(n);
        std::lock_guard lock(fftw_planner_mutex());
        impl_->r01 = fftw_plan_r2r_1d(len, a.data(), b.data(), FFTW_RODFT01, FFTW_ESTIMATE | FFTW_UNALIGNED);
        impl_->r10 = fftw_plan_r2r_1d(len, a.data(), b.data(), FFTW_RODFT10, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!impl_->r01 || !impl_->r10) {
            throw std::runtime_error("DstPlan: FFTW planning failed");
        }
        return;
    }

    Eigen::MatrixXd r01(n, n);
    Eigen::MatrixXd r10(n, n);
    for (Index k = 0; k < n; ++k) {
        for (Index j = 0; j < n; ++j) {
            r01(k, j) = (j + 1 < n ? 2.0 : 1.0) * half_sample_sine((j + 1) * (2 * k + 1), n);
            r10(k, j) = 2.0 * half_sample_sine((2 * j + 1) * (k + 1), n);
        }
    }
    auto scaled = [](const Eigen::VectorXd& p, const Eigen::MatrixXd& r, const Eigen::VectorXd& q) {
        return Eigen::MatrixXd(p.asDiagonal() * r * q.asDiagonal());
    };
    for (Op op : {Op::forward, Op::inverse, Op::forward_transpose, Op::inverse_transpose}) {
        const int i = static_cast<int>(op);
        const bool uses_r01 = op == Op::forward || op == Op::inverse_transpose;
        impl_->dense[i] = scaled(post[i], uses_r01 ? r01 : r10, pre[i]);
    }
}

DstPlan::~DstPlan() = default;
DstPlan::DstPlan(DstPlan&&) noexcept = default;
DstPlan& DstPlan::operator=(DstPlan&&) noexcept = default;

void DstPlan::apply(Op op, const Eigen::MatrixXd& in, Eigen::MatrixXd& out) const
{
    if (in.cols() != length_) {
        throw DimensionError("DstPlan: block count " + std::to_string(in.cols()) + " does not match plan length " +
                             std::to_string(length_));
    }
    const int i = static_cast<int>(op);
    const Index rows = in.rows();
    if (!fast_) {
        Eigen::MatrixXd result = in * impl_->dense[i].transpose();
        out = std::move(result);
        return;
    }
    if (&out != &in) {
        out.resize(rows, length_);
    }
    const bool uses_r01 = op == Op::forward || op == Op::inverse_transpose;
    fftw_plan plan = uses_r01 ? impl_->r01 : impl_->r10;
    const Eigen::VectorXd& pre = impl_->pre[i];
    const Eigen::VectorXd& post = impl_->post[i];

    // Rows (spatial components) are split into one contiguous chunk per
    // worker; each chunk owns a pair of scratch buffers.
    const Index chunks = std::min<Index>(std::max(num_threads(), 1), rows);
    parallel_for(chunks, [&](std::ptrdiff_t c) {
        const Index begin = rows * c / chunks;
        const Index end = rows * (c + 1) / chunks;
        Eigen::VectorXd src(length_);
        Eigen::VectorXd dst(length_);
        for (Index r = begin; r < end; ++r) {
            src = in.row(r).transpose().cwiseProduct(pre);
            fftw_execute_r2r(plan, src.data(), dst.data());
            out.row(r) = dst.cwiseProduct(post).transpose();
        }
    });
}

void DstPlan::forward(const BlockVector& in, BlockVector& out) const
{
    if (&out != &in) {
        out = BlockVector(in.dim(), in.steps());
    }
    apply(Op::forward, in.data(), out.data());
}

void DstPlan::inverse(const BlockVector& in, BlockVector& out) const
{
    if (&out != &in) {
        out = BlockVector(in.dim(), in.steps());
    }
    apply(Op::inverse, in.data(), out.data());
}

void DstPlan::forward_transpose(const BlockVector& in, BlockVector& out) const
{
    if (&out != &in) {
        out = BlockVector(in.dim(), in.steps());
    }
    apply(Op::forward_transpose, in.data(), out.data());
}

void DstPlan::inverse_transpose(const BlockVector& in, BlockVector& out) const
{
    if (&out != &in) {
        out = BlockVector(in.dim(), in.steps());
    }
    apply(Op::inverse_transpose, in.data(), out.data());
}

BlockVector DstPlan::forward(const BlockVector& in) const
{
    BlockVector out;
    forward(in, out);
    return out;
}

BlockVector DstPlan::inverse(const BlockVector& in) const
{
    BlockVector out;
    inverse(in, out);
    return out;
}

BlockVector DstPlan::forward_transpose(const BlockVector& in) const
{
    BlockVector out;
    forward_transpose(in, out);
    return out;
}

BlockVector DstPlan::inverse_transpose(const BlockVector& in) const
{
    BlockVector out;
    inverse_transpose(in, out);
    return out;
}

namespace {

Eigen::MatrixXd as_row(std::span<const double> v)
{
    return Eigen::Map<const Eigen::RowVectorXd>(v.data(), static_cast<Index>(v.size()));
}

void store_row(const Eigen::MatrixXd& row, std::span<double> out)
{
    if (static_cast<Index>(out.size()) != row.cols()) {
        throw DimensionError("DstPlan: output span has wrong length");
    }
    Eigen::Map<Eigen::RowVectorXd>(out.data(), row.cols()) = row;
}

}  // namespace

void DstPlan::forward(std::span<const double> in, std::span<double> out) const
{
    Eigen::MatrixXd r;
    apply(Op::forward, as_row(in), r);
    store_row(r, out);
}

void DstPlan::inverse(std::span<const double> in, std::span<double> out) const
{
    Eigen::MatrixXd r;
    apply(Op::inverse, as_row(in), r);
    store_row(r, out);
}

void DstPlan::forward_transpose(std::span<const double> in, std::span<double> out) const
{
    Eigen::MatrixXd r;
    apply(Op::forward_transpose, as_row(in), r);
    store_row(r, out);
}

void DstPlan::inverse_transpose(std::span<const double> in, std::span<double> out) const
{
    Eigen::MatrixXd r;
    apply(Op::inverse_transpose, as_row(in), r);
    store_row(r, out);
}

Eigen::VectorXd dst_frequencies(Index length)
{
    if (length < 1) {
        throw InputError("dst_frequencies: length must be >= 1");
    }
    Eigen::VectorXd mu(length);
    for (Index k = 0; k < length; ++k) {
        mu[k] = 2.0 * std::sin(static_cast<double>(2 * k + 1) * std::numbers::pi / static_cast<double>(4 * length));
    }
    return mu;
}

}  // namespace timepar
