#pragma once

#include "timepar/sparse.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace timepar {

enum class SpaceDim { one = 1, two = 2 };

/// Structured unit-interval / unit-square mesh with homogeneous Dirichlet
/// boundary; unknowns are the interior nodes in lexicographic order.
struct MeshInfo {
    SpaceDim space = SpaceDim::one;
    int cells = 2;  ///< cells per side

    double h() const { return 1.0 / cells; }
    Index interior_per_side() const { return cells - 1; }
    Index dim() const;
};

struct MassStiffness {
    SpatialMatrix mass;
    SpatialMatrix stiffness;
};

/// P1 elements on a uniform mesh of (0,1): M = h/6 tridiag(1,4,1),
/// A = 1/h tridiag(-1,2,-1) on the num_cells-1 interior nodes.
MassStiffness assemble_mass_stiffness_1d(int num_cells);

/// P1 elements on the unit square, each square cell split into two triangles
/// along the (0,0)-(1,1) diagonal. A is the 5-point stencil (4,-1,-1,-1,-1).
MassStiffness assemble_mass_stiffness_2d(int cells_per_side);

MassStiffness assemble_mass_stiffness(const MeshInfo& mesh);

/// Partition 0 = t_0 < t_1 < ... < t_N = T.
class TimeGrid {
public:
    TimeGrid() = default;
    /// Validates t_0 = 0 and strictly increasing nodes.
    explicit TimeGrid(std::vector<double> nodes);

    int steps() const { return static_cast<int>(nodes_.size()) - 1; }
    double final_time() const { return nodes_.back(); }
    /// t_n for n = 0..N
    double node(int n) const { return nodes_[static_cast<std::size_t>(n)]; }
    /// tau_{n+1} = t_{n+1} - t_n for zero-based step index n
    double step(int n) const { return nodes_[static_cast<std::size_t>(n) + 1] - nodes_[static_cast<std::size_t>(n)]; }
    std::vector<double> step_lengths() const;
    const std::vector<double>& nodes() const { return nodes_; }

private:
    std::vector<double> nodes_;
};

enum class GridKind { uniform, perturbed };

/// Uniform: tau_n = T/N. Perturbed: tau_n proportional to 1 + perturbation*xi_n
/// with xi_n uniform in [-1,1] drawn from mt19937_64(seed), rescaled to sum T.
TimeGrid build_time_grid(GridKind kind, int steps, double final_time, double perturbation = 0.0,
                         std::uint64_t seed = 0);

/// A_n = scale * (*base). Distinct steps may share one base matrix.
struct StepOperator {
    std::shared_ptr<const SpatialMatrix> base;
    double scale = 1.0;

    void multiply(ConstVectorRef in, VectorRef out) const;
    SpatialMatrix materialize() const { return base->scaled(scale); }
};

/// Complete discrete problem M(u_n - u_{n-1}) + tau_n A_n u_n = tau_n f_n.
///
/// `load[n]` is the algebraic load vector f_{n+1} (already tested against the
/// basis, i.e. mass-weighted for FEM data).
struct ProblemSpec {
    SpatialMatrix mass;
    std::vector<StepOperator> stiffness;
    TimeGrid grid;
    std::vector<SpatialVector> load;
    SpatialVector initial;
    double tau_ref = 1.0;
    StepOperator reference;
    double alpha = 1.0;
    std::optional<MeshInfo> mesh;
    std::uint64_t seed = 0;

    int steps() const { return grid.steps(); }
    Index dim() const { return mass.dim(); }
    /// Checks sizes and positivity; throws InputError/DimensionError.
    void validate() const;
};

/// Positive time-dependent diffusion coefficient c(t).
using Coefficient = std::function<double(double)>;

enum class DataKind {
    /// f = 0, u(0) = sin(pi x) (times sin(pi y) in 2D)
    sine_initial,
    /// exact solution exp(-t) sin(pi x)[sin(pi y)], forcing to match
    manufactured,
};

struct HeatProblemOptions {
    SpaceDim space = SpaceDim::one;
    int cells = 8;
    Coefficient coefficient = [](double) { return 1.0; };
    DataKind data = DataKind::sine_initial;
};

/// Reference pair: tau_ref = geometric mean of the steps, A_ref = A_{ceil(N/2)}.
/// alpha is filled by compute_alpha.
ProblemSpec make_heat_problem(const HeatProblemOptions& options, const TimeGrid& grid);

/// max_n max(lambda_max(tau_n A_n, tau A), 1/lambda_min(tau_n A_n, tau A)).
/// Steps sharing the reference base reduce to a scalar ratio; other steps use a
/// dense generalized eigen-solve (DenseLimitExceeded for huge dims).
double compute_alpha(const ProblemSpec& spec);

/// Nodal interpolant of g on the interior nodes of the mesh.
SpatialVector interpolate(const MeshInfo& mesh, const std::function<double(double, double)>& g);

/// Plain-text problem exchange format (see docs/problem_format.md).
void write_problem(std::ostream& out, const ProblemSpec& spec);
ProblemSpec read_problem(std::istream& in);

}  // namespace timepar
