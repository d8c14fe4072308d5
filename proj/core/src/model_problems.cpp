#include "timepar/model_problems.hpp"

#include "timepar/eigen_extremal.hpp"
#include "timepar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <string>

namespace timepar {

Index MeshInfo::dim() const
{
    const Index m = interior_per_side();
    return space == SpaceDim::one ? m : m * m;
}

MassStiffness assemble_mass_stiffness_1d(int num_cells)
{
    if (num_cells < 2) {
        throw InputError("assemble_mass_stiffness_1d: need at least 2 cells, got " + std::to_string(num_cells));
    }
    const Index dim = num_cells - 1;
    const double h = 1.0 / num_cells;
    std::vector<Entry> mass;
    std::vector<Entry> stiff;
    for (Index i = 0; i < dim; ++i) {
        mass.push_back({i, i, 4.0 * h / 6.0});
        stiff.push_back({i, i, 2.0 / h});
        if (i + 1 < dim) {
            mass.push_back({i, i + 1, h / 6.0});
            stiff.push_back({i, i + 1, -1.0 / h});
        }
    }
    return {SpatialMatrix::from_entries(dim, mass), SpatialMatrix::from_entries(dim, stiff)};
}

MassStiffness assemble_mass_stiffness_2d(int cells_per_side)
{
    if (cells_per_side < 2) {
        throw InputError("assemble_mass_stiffness_2d: need at least 2 cells per side, got " +
                         std::to_string(cells_per_side));
    }
    const Index m = cells_per_side - 1;
    const Index dim = m * m;
    const double h = 1.0 / cells_per_side;
    const double h2 = h * h;
    auto id = [m](Index i, Index j) { return j * m + i; };

    // Upper-triangle stencil: east, north and north-east neighbours. The
    // north-east link is the shared diagonal edge; it carries mass but no
    // stiffness for right-angled triangles.
    std::vector<Entry> mass;
    std::vector<Entry> stiff;
    for (Index j = 0; j < m; ++j) {
        for (Index i = 0; i < m; ++i) {
            const Index c = id(i, j);
            mass.push_back({c, c, h2 / 2.0});
            stiff.push_back({c, c, 4.0});
            if (i + 1 < m) {
                mass.push_back({c, id(i + 1, j), h2 / 12.0});
                stiff.push_back({c, id(i + 1, j), -1.0});
            }
            if (j + 1 < m) {
                mass.push_back({c, id(i, j + 1), h2 / 12.0});
                stiff.push_back({c, id(i, j + 1), -1.0});
            }
            if (i + 1 < m && j + 1 < m) {
                mass.push_back({c, id(i + 1, j + 1), h2 / 12.0});
            }
        }
    }
    return {SpatialMatrix::from_entries(dim, mass), SpatialMatrix::from_entries(dim, stiff)};
}

MassStiffness assemble_mass_stiffness(const MeshInfo& mesh)
{
    return mesh.space == SpaceDim::one ? assemble_mass_stiffness_1d(mesh.cells)
                                       : assemble_mass_stiffness_2d(mesh.cells);
}

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes))
{
    if (nodes_.size() < 2) {
        throw InputError("TimeGrid: need at least one step");
    }
    if (nodes_.front() != 0.0) {
        throw InputError("TimeGrid: t_0 must be 0");
    }
    for (std::size_t n = 1; n < nodes_.size(); ++n) {
        if (!(nodes_[n] > nodes_[n - 1])) {
            throw InputError("TimeGrid: nodes must be strictly increasing");
        }
    }
}

std::vector<double> TimeGrid::step_lengths() const
{
    std::vector<double> taus(static_cast<std::size_t>(steps()));
    for (int n = 0; n < steps(); ++n) {
        taus[static_cast<std::size_t>(n)] = step(n);
    }
    return taus;
}

TimeGrid build_time_grid(GridKind kind, int steps, double final_time, double perturbation, std::uint64_t seed)
{
    if (steps < 1) {
        throw InputError("build_time_grid: N must be >= 1");
    }
    if (!(final_time > 0.0)) {
        throw InputError("build_time_grid: T must be positive");
    }
    if (!(perturbation >= 0.0 && perturbation < 1.0)) {
        throw InputError("build_time_grid: perturbation must lie in [0, 1)");
    }
    std::vector<double> weights(static_cast<std::size_t>(steps), 1.0);
    if (kind == GridKind::perturbed && perturbation > 0.0) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> xi(-1.0, 1.0);
        for (auto& w : weights) {
            w = 1.0 + perturbation * xi(rng);
        }
    }
    double total = 0.0;
    for (double w : weights) {
        total += w;
    }
    std::vector<double> nodes(static_cast<std::size_t>(steps) + 1, 0.0);
    double acc = 0.0;
    for (int n = 0; n < steps; ++n) {
        acc += weights[static_cast<std::size_t>(n)];
        nodes[static_cast<std::size_t>(n) + 1] = final_time * acc / total;
    }
    nodes.back() = final_time;
    return TimeGrid(std::move(nodes));
}

void StepOperator::multiply(ConstVectorRef in, VectorRef out) const
{
    base->multiply(in, out);
    out *= scale;
}

void ProblemSpec::validate() const
{
    const Index d = dim();
    const auto n = static_cast<std::size_t>(steps());
    if (stiffness.size() != n || load.size() != n) {
        throw DimensionError("ProblemSpec: need one stiffness operator and one load per step");
    }
    for (const auto& op : stiffness) {
        if (!op.base || op.base->dim() != d) {
            throw DimensionError("ProblemSpec: stiffness dimension mismatch");
        }
        if (!(op.scale > 0.0)) {
            throw InputError("ProblemSpec: stiffness scale must be positive");
        }
    }
    for (const auto& f : load) {
        if (f.size() != d) {
            throw DimensionError("ProblemSpec: load dimension mismatch");
        }
    }
    if (initial.size() != d) {
        throw DimensionError("ProblemSpec: initial datum dimension mismatch");
    }
    if (!reference.base || reference.base->dim() != d || !(reference.scale > 0.0)) {
        throw InputError("ProblemSpec: invalid reference operator");
    }
    if (!(tau_ref > 0.0)) {
        throw InputError("ProblemSpec: tau_ref must be positive");
    }
    if (!(alpha >= 1.0)) {
        throw InputError("ProblemSpec: alpha must be >= 1");
    }
}

SpatialVector interpolate(const MeshInfo& mesh, const std::function<double(double, double)>& g)
{
    const Index m = mesh.interior_per_side();
    const double h = mesh.h();
    SpatialVector v(mesh.dim());
    if (mesh.space == SpaceDim::one) {
        for (Index i = 0; i < m; ++i) {
            v[i] = g(h * static_cast<double>(i + 1), 0.0);
        }
    } else {
        for (Index j = 0; j < m; ++j) {
            for (Index i = 0; i < m; ++i) {
                v[j * m + i] = g(h * static_cast<double>(i + 1), h * static_cast<double>(j + 1));
            }
        }
    }
    return v;
}

ProblemSpec make_heat_problem(const HeatProblemOptions& options, const TimeGrid& grid)
{
    const MeshInfo mesh{options.space, options.cells};
    auto [mass, stiffness] = assemble_mass_stiffness(mesh);
    auto base = std::make_shared<const SpatialMatrix>(std::move(stiffness));

    ProblemSpec spec;
    spec.mass = std::move(mass);
    spec.grid = grid;
    spec.mesh = mesh;
    const int steps = grid.steps();

    double log_tau_sum = 0.0;
    spec.stiffness.reserve(static_cast<std::size_t>(steps));
    for (int n = 0; n < steps; ++n) {
        const double c = options.coefficient(grid.node(n + 1));
        if (!(c > 0.0) || !std::isfinite(c)) {
            throw InputError("make_heat_problem: coefficient must be positive, got " + std::to_string(c) +
                             " at t=" + std::to_string(grid.node(n + 1)));
        }
        spec.stiffness.push_back({base, c});
        log_tau_sum += std::log(grid.step(n));
    }
    spec.tau_ref = std::exp(log_tau_sum / steps);
    spec.reference = spec.stiffness[static_cast<std::size_t>((steps + 1) / 2 - 1)];

    const double pi = std::numbers::pi;
    const bool two_d = options.space == SpaceDim::two;
    auto shape = [two_d, pi](double x, double y) {
        return two_d ? std::sin(pi * x) * std::sin(pi * y) : std::sin(pi * x);
    };
    spec.initial = interpolate(mesh, shape);
    spec.load.assign(static_cast<std::size_t>(steps), SpatialVector::Zero(mesh.dim()));
    if (options.data == DataKind::manufactured) {
        // u = exp(-t) s(x): u_t - c(t) Laplace u = (-1 + c(t) d pi^2) u
        const double d = two_d ? 2.0 : 1.0;
        for (int n = 0; n < steps; ++n) {
            const double t = grid.node(n + 1);
            const double amp = (-1.0 + spec.stiffness[static_cast<std::size_t>(n)].scale * d * pi * pi) * std::exp(-t);
            spec.load[static_cast<std::size_t>(n)] = amp * spmv(spec.mass, spec.initial);
        }
    }
    spec.alpha = compute_alpha(spec);
    spec.validate();
    return spec;
}

double compute_alpha(const ProblemSpec& spec)
{
    const double ref = spec.tau_ref * spec.reference.scale;
    std::map<const SpatialMatrix*, ExtremalEigenvalues> base_ratios;
    double alpha = 1.0;
    for (int n = 0; n < spec.steps(); ++n) {
        const auto& op = spec.stiffness[static_cast<std::size_t>(n)];
        const double factor = spec.grid.step(n) * op.scale / ref;
        double lo = factor;
        double hi = factor;
        if (op.base != spec.reference.base) {
            auto it = base_ratios.find(op.base.get());
            if (it == base_ratios.end()) {
                it = base_ratios.emplace(op.base.get(),
                                         dense_generalized_eig_extremal(op.base->to_dense(),
                                                                        spec.reference.base->to_dense()))
                         .first;
            }
            lo = factor * it->second.min;
            hi = factor * it->second.max;
        }
        if (!(lo > 0.0)) {
            throw NonSpdError("compute_alpha: tau_n A_n is not positive definite relative to tau A");
        }
        alpha = std::max({alpha, hi, 1.0 / lo});
    }
    return alpha;
}

}  // namespace timepar
