#pragma once

// Explicit time integration of dF/dt = H, trajectory functionals, and the
// type-I / type-II rescalings.

#include "mcflow/curvature.hpp"
#include "mcflow/exec.hpp"
#include "mcflow/geometry.hpp"
#include "mcflow/grid.hpp"

#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mcf {

enum class Integrator { RK4, Euler };
enum class FlowMode { Ancient, Forward };

std::string_view integrator_name(Integrator i);
Integrator parse_integrator(std::string_view name);
std::string_view mode_name(FlowMode m);
FlowMode parse_mode(std::string_view name);

struct FlowConfig {
    double cfl = 0.2;
    Integrator integrator = Integrator::RK4;
    double t_end = 0;
    long max_steps = 1'000'000;
    double stop_on_blowup = std::numeric_limits<double>::infinity();  ///< cap on max |h|^2
    PinchSpec pinch;
    int snapshot_every = 10;
    /// Extra times at which a record is forced; steps are shortened to land
    /// on them exactly.
    std::vector<double> record_times;
    FlowMode mode = FlowMode::Forward;
    bool polar_filter = true;
    Exec exec = Exec::Parallel;

    void validate() const;
};

/// Longitudinal Fourier filter for lat-long grids. Row i keeps mode m with
/// weight min(1, s(N/2) sin^2(theta_i) / s(m)), s the symbol of the discrete
/// second derivative, so the stiffest longitude modes near the poles are
/// damped down to the equatorial stiffness. Modes 0 and 1 pass unchanged.
class PolarFilter {
public:
    explicit PolarFilter(const ParamGrid& grid);
    ~PolarFilter();
    PolarFilter(const PolarFilter&) = delete;
    PolarFilter& operator=(const PolarFilter&) = delete;

    /// Filters a node-major field with `dim` components per node in place.
    void apply(std::span<double> field, int dim, Exec exec) const;
    double weight(int row, int mode) const { return weights_[static_cast<std::size_t>(row) * modes_ + mode]; }

private:
    struct Plans;
    int rows_ = 0;
    int cols_ = 0;
    int modes_ = 0;
    std::vector<double> weights_;
    std::unique_ptr<Plans> plans_;
};

/// Smallest ambient grid step over all nodes and directions.
double min_spacing(const GeometryField& geo);
double max_normh2(const GeometryField& geo);

/// dt = cfl h^2 / (2n (1 + max|h|^2 h^2)), h = min_spacing.
double cfl_dt(const GeometryField& geo, double cfl);
double cfl_dt(const DiscreteImmersion& im, double cfl);

/// Mean curvature velocity (filtered on lat-long grids when a filter is given).
std::vector<double> velocity(const DiscreteImmersion& im, const PolarFilter* filter, Exec exec);

/// One step of length dt. `k1`, when given, is the velocity at `im`.
DiscreteImmersion step(const DiscreteImmersion& im, double dt, Integrator integrator,
                       const PolarFilter* filter = nullptr, Exec exec = Exec::Parallel,
                       const std::vector<double>* k1 = nullptr);

struct DiagnosticsRecord {
    double t = 0;
    double area = 0;
    double intH2 = 0;
    double maxH = 0;
    double minH = 0;
    double maxRatio = 0;
    double minQ = 0;   ///< min over nodes of -Q
    double phi = 0;    ///< ∫ f_sigma^p dμ at the configured (sigma, p)
    std::optional<double> gaussBonnet;
    double tIq = std::numeric_limits<double>::quiet_NaN();

    // Reported alongside the main table.
    long step = 0;
    double maxQ = 0;
    double maxF = 0;
    double phiAlt = 0;      ///< (sigma, p) = (0.05, 40)
    double gammaRatio = 0;  ///< max f^{γp} / (|H|^2 f^p), γ = 1 + 2/(σp)
};

struct FsigmaStats {
    double phi = 0;
    double max_f = 0;
    double gamma_ratio = 0;
};

/// f_sigma = |h°|^2 / |H|^{2(1-sigma)}. Throws MinimalPointError if some node
/// has |H|^2 < 1e-14 max|H|^2.
FsigmaStats fsigma_integral(const GeometryField& geo, const DiscreteImmersion& im, double sigma, double p);
FsigmaStats fsigma_integral(const DiscreteImmersion& im, double sigma, double p);

/// tIq is (-t) max|H|^2 in Ancient mode and (T - t) max|H|^2 in Forward mode
/// (NaN while T is unknown).
DiagnosticsRecord diagnostics(const GeometryField& geo, const DiscreteImmersion& im, const PinchSpec& pinch,
                              FlowMode mode, std::optional<double> T = std::nullopt);
DiagnosticsRecord diagnostics(const DiscreteImmersion& im, const PinchSpec& pinch, FlowMode mode,
                              std::optional<double> T = std::nullopt);

enum class StopReason { EndTime, MaxSteps, Blowup, Degenerate };
std::string_view stop_name(StopReason r);

struct Trajectory {
    std::vector<DiscreteImmersion> snapshots;
    std::vector<DiagnosticsRecord> diagnostics;
    FlowMode mode = FlowMode::Forward;
    std::optional<double> T_singular;
    StopReason stop = StopReason::EndTime;
    std::string message;
};

/// Integrates from the seed. Records the seed, every `snapshot_every` steps,
/// every requested record time and the final state. Throws
/// DegenerateGeometryError only when the seed itself is degenerate.
Trajectory run(const DiscreteImmersion& seed, const FlowConfig& config);

/// Linear extrapolation of 1/max|H|^2 through the last two records.
std::optional<double> estimate_singular_time(std::span<const DiagnosticsRecord> recs);

struct TypeClass {
    bool type_I = false;
    double C2 = 0;      ///< sup of the type-I quantity
    double C = 0;       ///< sqrt(C2)
    double growth = 0;  ///< relative increase over the half nearest the asymptotic end
};

/// Type I when the type-I quantity grows by at most 5% over the half of the
/// series nearest the asymptotic end (t -> -inf for Ancient, t -> T for
/// Forward). Throws std::invalid_argument for fewer than 10 usable records.
TypeClass classify_type(std::span<const DiagnosticsRecord> recs, FlowMode mode);
TypeClass classify_type(const Trajectory& traj);

struct RescaleResult {
    Trajectory trajectory;
    double L = 0;
    long base_node = 0;
    double base_time = 0;
    std::size_t base_index = 0;
};

struct TimeWindow {
    double t_min = -std::numeric_limits<double>::infinity();
    double t_max = std::numeric_limits<double>::infinity();
};

/// Hamilton blow-up: (x_j, t_j) maximise (-t)|H|^2 (Ancient) or (T - t)|H|^2
/// (Forward) over snapshots in the window, ties to the earliest time then the
/// lowest node. Every snapshot becomes sqrt(L)(F - F(x_j, t_j)) at time
/// (t - t_j) L with L = |H(x_j, t_j)|^2. Diagnostics of the rescaled
/// snapshots are the similarity images of the original geometry, so the
/// normalization max|H| = 1 at tau = 0 holds to rounding.
RescaleResult blowup_type2(const Trajectory& traj, TimeWindow window, Exec exec = Exec::Parallel);

/// F(x, -t_j tau) / sqrt(-t_j) at the given tau values, interpolating stored
/// snapshots linearly in t. Throws std::invalid_argument unless t_j < 0 and
/// the trajectory covers every needed time. Stored snapshots within 1e-12
/// of a needed time are used as they are.
RescaleResult rescale_type1(const Trajectory& traj, double t_j, std::span<const double> taus);

/// Evenly spaced tau in [-2, -1].
std::vector<double> default_type1_taus(int count = 11);

struct AreaFit {
    double c = 0;
    double r = 0;
    int points = 0;
};

/// Least-squares fit of log area = log c + r log|t - t_ref| over records
/// with t in the window; t_ref is 0 (Ancient) or T (Forward).
AreaFit fit_area_decay(std::span<const DiagnosticsRecord> recs, TimeWindow window, double t_ref = 0);

/// Mean distance of the nodes from the origin.
double mean_radius(const DiscreteImmersion& im);

/// Main table: t,area,intH2,maxH,minH,maxRatio,minQ,phi,gaussBonnet,tIq.
void write_diagnostics_csv(std::ostream& os, std::span<const DiagnosticsRecord> recs);
/// t,step,maxQ,maxF,phiAlt,gammaRatio.
void write_extra_csv(std::ostream& os, std::span<const DiagnosticsRecord> recs);
/// Throws DataError for a malformed table.
std::vector<DiagnosticsRecord> read_diagnostics_csv(std::istream& is);

}  // namespace mcf
