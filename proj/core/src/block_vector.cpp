#include "timepar/block_vector.hpp"

#include "timepar/errors.hpp"

#include <cmath>
#include <string>

namespace timepar {

BlockVector::BlockVector(Index dim, Index steps)
{
    if (dim < 1 || steps < 1) {
        throw InputError("BlockVector: dim and N must be positive");
    }
    data_ = Eigen::MatrixXd::Zero(dim, steps);
}

BlockVector BlockVector::random(Index dim, Index steps, std::mt19937_64& rng)
{
    BlockVector v(dim, steps);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (Index n = 0; n < steps; ++n) {
        for (Index i = 0; i < dim; ++i) {
            v.data_(i, n) = dist(rng);
        }
    }
    return v;
}

void require_same_shape(const BlockVector& a, const BlockVector& b, const char* where)
{
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(where) + ": block vector shapes differ (" +
                             std::to_string(a.dim()) + "x" + std::to_string(a.steps()) + " vs " +
                             std::to_string(b.dim()) + "x" + std::to_string(b.steps()) + ")");
    }
}

BlockVector& BlockVector::operator+=(const BlockVector& other)
{
    require_same_shape(*this, other, "BlockVector::operator+=");
    data_ += other.data_;
    return *this;
}

BlockVector& BlockVector::operator-=(const BlockVector& other)
{
    require_same_shape(*this, other, "BlockVector::operator-=");
    data_ -= other.data_;
    return *this;
}

BlockVector& BlockVector::operator*=(double factor)
{
    data_ *= factor;
    return *this;
}

BlockVector& BlockVector::axpy(double factor, const BlockVector& other)
{
    require_same_shape(*this, other, "BlockVector::axpy");
    data_ += factor * other.data_;
    return *this;
}

double BlockVector::dot(const BlockVector& other) const
{
    require_same_shape(*this, other, "BlockVector::dot");
    double sum = 0.0;
    for (Index n = 0; n < steps(); ++n) {
        sum += data_.col(n).dot(other.data_.col(n));
    }
    return sum;
}

double BlockVector::norm() const
{
    return std::sqrt(dot(*this));
}

BlockVector operator+(BlockVector a, const BlockVector& b)
{
    a += b;
    return a;
}

BlockVector operator-(BlockVector a, const BlockVector& b)
{
    a -= b;
    return a;
}

BlockVector operator*(double factor, BlockVector a)
{
    a *= factor;
    return a;
}

SaddleVector::SaddleVector(BlockVector p_in, BlockVector u_in) : p(std::move(p_in)), u(std::move(u_in))
{
    require_same_shape(p, u, "SaddleVector");
}

SaddleVector& SaddleVector::axpy(double factor, const SaddleVector& other)
{
    p.axpy(factor, other.p);
    u.axpy(factor, other.u);
    return *this;
}

SaddleVector& SaddleVector::operator*=(double factor)
{
    p *= factor;
    u *= factor;
    return *this;
}

}  // namespace timepar
