#include "timepar/errors.hpp"
#include "timepar/spatial_solvers.hpp"

#include <sstream>

namespace timepar {

namespace {

Eigen::SparseMatrix<double> prolongation_1d(int coarse_cells)
{
    const Index mc = coarse_cells - 1;
    const Index mf = 2 * coarse_cells - 1;
    std::vector<Eigen::Triplet<double>> t;
    for (Index j = 0; j < mc; ++j) {
        const Index c = 2 * j + 1;
        t.emplace_back(c, j, 1.0);
        t.emplace_back(c - 1, j, 0.5);
        t.emplace_back(c + 1, j, 0.5);
    }
    Eigen::SparseMatrix<double> p(mf, mc);
    p.setFromTriplets(t.begin(), t.end());
    return p;
}

// Nodal interpolation on the triangulation split along (0,0)-(1,1): a coarse
// hat function is 1/2 at its six fine edge-midpoint neighbours.
Eigen::SparseMatrix<double> prolongation_2d(int coarse_cells)
{
    const Index mc = coarse_cells - 1;
    const Index mf = 2 * coarse_cells - 1;
    std::vector<Eigen::Triplet<double>> t;
    static constexpr int offsets[6][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}};
    for (Index jc = 0; jc < mc; ++jc) {
        for (Index ic = 0; ic < mc; ++ic) {
            const Index col = jc * mc + ic;
            const Index fi = 2 * ic + 1;
            const Index fj = 2 * jc + 1;
            t.emplace_back(fj * mf + fi, col, 1.0);
            for (const auto& o : offsets) {
                t.emplace_back((fj + o[1]) * mf + (fi + o[0]), col, 0.5);
            }
        }
    }
    Eigen::SparseMatrix<double> p(mf * mf, mc * mc);
    p.setFromTriplets(t.begin(), t.end());
    return p;
}

SpatialMatrix galerkin_product(const Eigen::SparseMatrix<double>& p, const SpatialMatrix& fine)
{
    const Eigen::SparseMatrix<double> coarse = Eigen::SparseMatrix<double>(p.transpose()) * (fine.full() * p);
    std::vector<Entry> entries;
    for (Index j = 0; j < coarse.outerSize(); ++j) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(coarse, j); it; ++it) {
            if (it.row() <= it.col()) {
                entries.push_back({it.row(), it.col(), it.value()});
            }
        }
    }
    return SpatialMatrix::from_entries(coarse.rows(), entries);
}

}  // namespace

MgHierarchy::MgHierarchy(SpaceDim space, int fine_cells) : space_(space)
{
    if (fine_cells < 4 || (fine_cells & (fine_cells - 1)) != 0) {
        throw InputError("build_mg_hierarchy: fine_cells must be a power of two >= 4, got " +
                         std::to_string(fine_cells));
    }
    for (int c = fine_cells; c >= 2; c /= 2) {
        cells_.push_back(c);
    }
    for (std::size_t l = 0; l + 1 < cells_.size(); ++l) {
        prolongations_.push_back(space == SpaceDim::one ? prolongation_1d(cells_[l + 1])
                                                        : prolongation_2d(cells_[l + 1]));
    }
    auto fine = assemble_mass_stiffness(MeshInfo{space, fine_cells});
    mass_ = galerkin_levels(fine.mass);
    stiffness_ = galerkin_levels(fine.stiffness);
}

Index MgHierarchy::dim(int level) const
{
    const Index m = cells(level) - 1;
    return space_ == SpaceDim::one ? m : m * m;
}

std::vector<SpatialMatrix> MgHierarchy::galerkin_levels(const SpatialMatrix& fine) const
{
    if (fine.dim() != dim(0)) {
        throw DimensionError("MgHierarchy::galerkin_levels: operator does not live on the finest level");
    }
    std::vector<SpatialMatrix> levels{fine};
    for (const auto& p : prolongations_) {
        levels.push_back(galerkin_product(p, levels.back()));
    }
    return levels;
}

std::shared_ptr<const MgHierarchy> build_mg_hierarchy(SpaceDim space, int fine_cells)
{
    return std::make_shared<const MgHierarchy>(space, fine_cells);
}

MgVcycleSolver::MgVcycleSolver(std::shared_ptr<const MgHierarchy> hierarchy,
                               std::vector<std::pair<double, LevelStack>> terms, const MgOptions& options)
    : hierarchy_(std::move(hierarchy)), terms_(std::move(terms)), options_(options)
{
    if (!hierarchy_) {
        throw InputError("MgVcycleSolver: missing hierarchy");
    }
    if (terms_.empty()) {
        throw InputError("MgVcycleSolver: no operator terms");
    }
    if (options_.vcycles < 1 || options_.smoothing < 1) {
        throw InputError("MgVcycleSolver: vcycles and smoothing must be >= 1");
    }
    damping_ = options_.damping > 0.0 ? options_.damping : default_damping(hierarchy_->space());
    const int levels = hierarchy_->levels();
    for (const auto& [c, stack] : terms_) {
        if (!stack || static_cast<int>(stack->size()) != levels) {
            throw DimensionError("MgVcycleSolver: operator stack does not match the hierarchy");
        }
    }
    for (int l = 0; l < levels; ++l) {
        SpatialVector diag = SpatialVector::Zero(hierarchy_->dim(l));
        for (const auto& [c, stack] : terms_) {
            diag += c * (*stack)[static_cast<std::size_t>(l)].diagonal_entries();
        }
        if ((diag.array() <= 0.0).any()) {
            throw NonSpdError("MgVcycleSolver: non-positive diagonal on level " + std::to_string(l));
        }
        inv_diag_.push_back(diag.cwiseInverse());
    }
    Eigen::MatrixXd coarse = Eigen::MatrixXd::Zero(hierarchy_->dim(levels - 1), hierarchy_->dim(levels - 1));
    for (const auto& [c, stack] : terms_) {
        coarse += c * stack->back().to_dense();
    }
    coarse_.compute(coarse);
    if (coarse_.info() != Eigen::Success) {
        throw NonSpdError("MgVcycleSolver: coarse operator is not SPD");
    }
}

void MgVcycleSolver::multiply(int level, ConstVectorRef in, VectorRef out) const
{
    SpatialVector tmp(in.size());
    out.setZero();
    for (const auto& [c, stack] : terms_) {
        (*stack)[static_cast<std::size_t>(level)].multiply(in, tmp);
        out += c * tmp;
    }
}

void MgVcycleSolver::vcycle(int level, ConstVectorRef b, VectorRef x) const
{
    if (level == hierarchy_->levels() - 1) {
        x = coarse_.solve(b);
        return;
    }
    const auto& inv_diag = inv_diag_[static_cast<std::size_t>(level)];
    SpatialVector r(b.size());

    x = damping_ * inv_diag.cwiseProduct(b);
    for (int s = 1; s < options_.smoothing; ++s) {
        multiply(level, x, r);
        x += damping_ * inv_diag.cwiseProduct(b - r);
    }

    multiply(level, x, r);
    r = b - r;
    const auto& p = hierarchy_->prolongation(level);
    const SpatialVector rc = p.transpose() * r;
    SpatialVector xc(rc.size());
    vcycle(level + 1, rc, xc);
    x += p * xc;

    for (int s = 0; s < options_.smoothing; ++s) {
        multiply(level, x, r);
        x += damping_ * inv_diag.cwiseProduct(b - r);
    }
}

void MgVcycleSolver::apply_inverse(ConstVectorRef b, VectorRef x) const
{
    vcycle(0, b, x);
    if (options_.vcycles == 1) {
        return;
    }
    SpatialVector r(b.size());
    SpatialVector dx(b.size());
    for (int c = 1; c < options_.vcycles; ++c) {
        multiply(0, x, r);
        r = b - r;
        vcycle(0, r, dx);
        x += dx;
    }
}

std::string MgVcycleSolver::describe() const
{
    std::ostringstream os;
    os << "mg(vcycles=" << options_.vcycles << ", smoothing=" << options_.smoothing << ", damping=" << damping_
       << ", levels=" << hierarchy_->levels() << ")";
    return os.str();
}

}  // namespace timepar
