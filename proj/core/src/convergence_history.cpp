#include "timepar/convergence_history.hpp"

#include "timepar/csv.hpp"

#include <ostream>

namespace timepar {

void ConvergenceHistory::write_csv(std::ostream& out, bool header) const
{
    CsvWriter csv(out);
    if (header) {
        csv.header({"iter", "residual", "s_norm_error", "d_norm_error", "wall_seconds", "fft_seconds",
                    "spatial_seconds"});
    }
    for (const auto& e : entries) {
        csv.row()
            .add(e.iter)
            .add(e.residual)
            .add(e.s_norm_error)
            .add(e.d_norm_error)
            .add(e.wall_seconds)
            .add(e.fft_seconds)
            .add(e.spatial_seconds)
            .end();
    }
}

}  // namespace timepar
