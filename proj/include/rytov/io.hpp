#pragma once

#include <iosfwd>
#include <string>

#include "rytov/noise.hpp"
#include "rytov/path.hpp"
#include "rytov/raytrace.hpp"

namespace rytov {

/// Shortest decimal form with 17 significant digits: round-trips to the same
/// double bit pattern.
std::string format_g17(double value);

/// Trajectory CSV: header then
/// t, r_x, r_y, r_z, p_x, p_y, p_z, gamma, hall_x, hall_y, hall_z, H
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Momentum path CSV with mandatory header t, p_x, p_y, p_z.
void write_path_csv(std::ostream& os, const MomentumPath& path);
MomentumPath read_path_csv(std::istream& is, bool closed, double closure_tol = 1e-9);

/// Ensemble summary as key: value lines followed by a histogram CSV block.
void write_ensemble_summary(std::ostream& os, const EnsembleSummary& summary);

/// Raw per-realization deviations, single column.
void write_deltas_csv(std::ostream& os, std::span<const double> deltas);

}  // namespace rytov
