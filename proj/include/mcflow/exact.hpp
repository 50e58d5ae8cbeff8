#pragma once

// Closed-form self-similar solutions and analytic seeds for the flow.

#include "mcflow/curvature.hpp"
#include "mcflow/grid.hpp"

#include <array>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

namespace mcf {

enum class SolutionKind { Sphere, Cylinder, Veronese, GeodesicCapSphere, TorusSeed };

std::string_view solution_name(SolutionKind kind);
/// Accepts sphere, cylinder, veronese, cap, torus (case-sensitive).
SolutionKind parse_solution(std::string_view name);

struct Perturbation {
    double amplitude = 0;
    int mode = 0;
};

struct SolutionSpec {
    SolutionKind kind = SolutionKind::Sphere;
    int n = 2;
    int k = 1;
    int m = 1;            ///< flat factor dimension (Cylinder)
    double radius = 1;    ///< R at time t0 (Sphere, Cylinder, Veronese, TorusSeed circle radius)
    double t0 = 0;
    double length = 2 * std::numbers::pi;  ///< period of the flat factor (Cylinder)
    double R_amb = 1;     ///< ambient sphere radius (cap)
    double rho0 = 1;      ///< cap geodesic radius at t0
    Perturbation perturbation;

    /// Throws std::invalid_argument for out-of-range parameters.
    void validate() const;
};

/// Shape data of a homothetically shrinking solution at one time.
struct HomotheticLaw {
    double R = 0;       ///< sphere, cylinder: factor radius; Veronese: radius of the containing sphere
    double normH = 0;
    double normh2 = 0;
    double ratio = 0;   ///< |h|^2 / |H|^2
    double tI = 0;      ///< (-t) |H|^2
};

/// R = sqrt(-2nt). Throws std::invalid_argument unless t < 0 and n >= 1.
HomotheticLaw sphere_law(int n, double t);
/// S^{n-m}_R x R^m with R = sqrt(-2(n-m)t).
HomotheticLaw cylinder_law(int n, int m, double t);
/// Veronese surface in R^5 inside the sphere of radius r = 2 sqrt(-t).
HomotheticLaw veronese_law(double t);

/// Unit-sphere direction (theta, phi) -> point of the Veronese surface in the
/// sphere of radius r, through the quadratic map of the sphere of radius sqrt(3).
std::array<double, 5> veronese_point(double r, double theta, double phi);

struct SolutionSample {
    std::vector<double> position;
    PointCurvature pc;
    CurvatureScalars scalars;
    double t = 0;
};

/// Exact second fundamental form of the Veronese surface at (theta, phi),
/// in an orthonormal frame, at time t < 0 of the self-similar solution.
SolutionSample veronese_sample(double t, double theta, double phi);

/// Geodesic sphere of radius rho in S^{n+1}_{R_amb}: rho(t) solves
/// d rho/dt = -(n/R_amb) cot(rho/R_amb).
struct CapState {
    bool extinct = false;
    double rho = 0;  ///< meaningful only when not extinct
};

CapState cap_law(int n, double R_amb, double rho0, double t0, double t);

/// Shrink rate c with R(t)^2 = R(t0)^2 - 2 c (t - t0): n for spheres, n - m for
/// cylinders, 2 for the Veronese surface and the product torus.
double homothetic_rate(const SolutionSpec& spec);

/// Squared homothetic radius at time t: radius^2 - 2 c (t - t0), where c is
/// n (sphere), n - m (cylinder) or 2 (Veronese, torus; with R^2 = 2a^2 for the torus).
double homothetic_radius2(const SolutionSpec& spec, double t);

/// Positions of the solution at time t on the grid. Supported pairings:
/// Sphere n = 1 on Circle, Sphere n = 2 and Veronese on LatLongSphere,
/// Cylinder (n = 2, m = 1) and TorusSeed on Torus2. The perturbation
/// amplitude * R * cos(mode * u0) is added along the outward radial normal,
/// u0 being the first grid coordinate. Throws std::invalid_argument for an
/// incompatible topology or a vanished solution.
DiscreteImmersion seed_immersion(const SolutionSpec& spec, const ParamGrid& grid, double t);

}  // namespace mcf
