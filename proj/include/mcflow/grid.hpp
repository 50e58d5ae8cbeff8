#pragma once

// Structured parameter grids and discrete immersions F: M^n -> R^{n+k}.

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mcf {

enum class Topology { Circle, Torus2, LatLongSphere };

std::string_view topology_name(Topology t);
/// Throws std::invalid_argument for unknown names.
Topology parse_topology(std::string_view name);

/// Periodic or pole-reflected structured grid.
///
/// Circle: theta_i = 2 pi i / N0 (N1 = 1).
/// Torus2: u_i = 2 pi i / N0, v_j = 2 pi j / N1.
/// LatLongSphere: theta_i = (i + 1/2) pi / N0 (no node on a pole),
///   phi_j = 2 pi j / N1 with N1 even.
struct ParamGrid {
    Topology topology = Topology::Circle;
    std::array<int, 2> res{8, 1};
    std::array<double, 2> spacing{0, 0};

    static ParamGrid circle(int n0);
    static ParamGrid torus(int n0, int n1);
    static ParamGrid lat_long(int n_lat, int n_lon);

    int intrinsic_dim() const noexcept { return topology == Topology::Circle ? 1 : 2; }
    long size() const noexcept { return static_cast<long>(res[0]) * res[1]; }
    double coord(int dir, int idx) const noexcept;
    /// Parameter-space cell volume.
    double cell_volume() const noexcept;

    /// Throws std::invalid_argument when a resolution is below 8, the
    /// longitude count is odd, or spacing disagrees with the topology.
    void validate() const;
};

/// Where a stencil offset lands after applying the topology rules.
struct GhostRef {
    long node = 0;
    bool reflected = false;  ///< crossed a pole: d/dtheta flips sign
    std::array<int, 2> wraps{0, 0};  ///< periods crossed, for Torus2 lattice shifts
};

/// Resolves (i, j), possibly outside the grid, to a stored node. Latitude rows
/// beyond a pole map to the mirrored row at longitude + pi.
GhostRef resolve(const ParamGrid& grid, int i, int j) noexcept;

struct DiscreteImmersion {
    ParamGrid grid;
    int n = 1;
    int k = 1;
    double t = 0;
    std::vector<double> positions;  ///< node-major, n + k coordinates per node
    /// Ambient translation picked up when a Torus2 coordinate wraps once
    /// (periodic patch of a noncompact factor). Empty means zero.
    std::array<std::vector<double>, 2> period_shift;

    int ambient_dim() const noexcept { return n + k; }
    long nodes() const noexcept { return grid.size(); }
    std::span<const double> point(long node) const
    {
        return {positions.data() + node * ambient_dim(), static_cast<std::size_t>(ambient_dim())};
    }
    std::span<double> point(long node)
    {
        return {positions.data() + node * ambient_dim(), static_cast<std::size_t>(ambient_dim())};
    }
    /// Coordinate c of the ghost-resolved point, with lattice shifts applied.
    double ghost_coord(const GhostRef& g, int c) const noexcept;

    /// Throws std::invalid_argument on shape mismatch or non-finite positions.
    void validate() const;
};

/// Line-oriented text snapshot:
///   MCFLOW v1 n=<n> k=<k> topology=<name> res=<r1>x<r2> t=<t>
/// then one node per line (row-major), n + k coordinates, 17 significant digits.
/// Nonzero Torus2 period shifts are appended to the header as
/// shift0=<c,..> shift1=<c,..>.
void write_snapshot(std::ostream& os, const DiscreteImmersion& im);
/// Throws DataError on malformed input.
DiscreteImmersion read_snapshot(std::istream& is);

void write_snapshot_file(const std::string& path, const DiscreteImmersion& im);
DiscreteImmersion read_snapshot_file(const std::string& path);

/// "%.17g" formatting used by every text output.
std::string format17(double v);

}  // namespace mcf
