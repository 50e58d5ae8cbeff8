#pragma once

// On-disk layout of a trajectory directory:
//   trajectory.txt         mode, record count, singular time, stop reason
//   diagnostics.csv        main diagnostics table
//   diagnostics_extra.csv  companion columns
//   snapshots/snap_NNNNNN.mcf, one per diagnostics row

#include "mcflow/flow.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mcf {

/// Returns the written paths relative to `dir`.
std::vector<std::string> save_trajectory(const std::filesystem::path& dir, const Trajectory& traj);

/// Throws DataError for missing, corrupt or inconsistent files.
Trajectory load_trajectory(const std::filesystem::path& dir);

}  // namespace mcf
