#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace timepar {

struct HistoryEntry {
    int iter = 0;
    /// Relative preconditioned residual of the saddle system.
    double residual = 0.0;
    std::optional<double> s_norm_error;
    std::optional<double> d_norm_error;
    /// Cumulative since the start of the solve.
    double wall_seconds = 0.0;
    double fft_seconds = 0.0;
    double spatial_seconds = 0.0;
};

struct ConvergenceHistory {
    std::string solver;
    std::vector<HistoryEntry> entries;
    bool converged = false;
    int iterations = 0;

    const HistoryEntry& last() const { return entries.back(); }
    /// Columns iter,residual,s_norm_error,d_norm_error,wall_seconds,fft_seconds,spatial_seconds;
    /// missing optional values are left empty.
    void write_csv(std::ostream& out, bool header = true) const;
};

}  // namespace timepar
