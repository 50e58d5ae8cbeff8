#include "mcflow/exact.hpp"

#include "mcflow/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mcf {

std::string_view solution_name(SolutionKind kind)
{
    switch (kind) {
    case SolutionKind::Sphere:
        return "sphere";
    case SolutionKind::Cylinder:
        return "cylinder";
    case SolutionKind::Veronese:
        return "veronese";
    case SolutionKind::GeodesicCapSphere:
        return "cap";
    case SolutionKind::TorusSeed:
        return "torus";
    }
    return "?";
}

SolutionKind parse_solution(std::string_view name)
{
    for (auto kind : {SolutionKind::Sphere, SolutionKind::Cylinder, SolutionKind::Veronese,
                      SolutionKind::GeodesicCapSphere, SolutionKind::TorusSeed})
        if (solution_name(kind) == name)
            return kind;
    throw std::invalid_argument("unknown solution kind '" + std::string(name) + "'");
}

void SolutionSpec::validate() const
{
    if (n < 1 || k < 1)
        throw std::invalid_argument("solution needs n >= 1 and k >= 1");
    if (!(radius > 0) || !std::isfinite(radius))
        throw std::invalid_argument("radius must be positive");
    if (!std::isfinite(perturbation.amplitude) || perturbation.mode < 0)
        throw std::invalid_argument("bad perturbation");
    switch (kind) {
    case SolutionKind::Sphere:
        break;
    case SolutionKind::Cylinder:
        if (m < 1 || m >= n)
            throw std::invalid_argument("cylinder needs 1 <= m < n");
        if (!(length > 0))
            throw std::invalid_argument("cylinder period length must be positive");
        break;
    case SolutionKind::Veronese:
        if (n != 2 || k != 3)
            throw std::invalid_argument("the Veronese surface has n = 2, k = 3");
        break;
    case SolutionKind::GeodesicCapSphere:
        if (!(R_amb > 0) || !(rho0 > 0) || !(rho0 < std::numbers::pi * R_amb))
            throw std::invalid_argument("cap needs 0 < rho0 < pi R_amb");
        break;
    case SolutionKind::TorusSeed:
        if (n != 2 || k < 2)
            throw std::invalid_argument("the product torus needs n = 2, k >= 2");
        break;
    }
}

namespace {

void require_negative(double t)
{
    if (!(t < 0))
        throw std::invalid_argument("self-similar laws need t < 0");
}

HomotheticLaw round_factor(int dim, double t)
{
    const double R = std::sqrt(-2.0 * dim * t);
    HomotheticLaw law;
    law.R = R;
    law.normH = dim / R;
    law.normh2 = dim / (R * R);
    law.ratio = 1.0 / dim;
    law.tI = -t * law.normH * law.normH;
    return law;
}

}  // namespace

HomotheticLaw sphere_law(int n, double t)
{
    if (n < 1)
        throw std::invalid_argument("sphere_law needs n >= 1");
    require_negative(t);
    return round_factor(n, t);
}

HomotheticLaw cylinder_law(int n, int m, double t)
{
    if (m < 1 || m >= n)
        throw std::invalid_argument("cylinder_law needs 1 <= m < n");
    require_negative(t);
    return round_factor(n - m, t);
}

HomotheticLaw veronese_law(double t)
{
    require_negative(t);
    HomotheticLaw law;
    law.R = 2 * std::sqrt(-t);
    law.normH = 2 / law.R;
    law.normh2 = (10.0 / 3.0) / (law.R * law.R);
    law.ratio = 5.0 / 6.0;
    law.tI = -t * law.normH * law.normH;
    return law;
}

namespace {

using Vec3 = std::array<double, 3>;
using Vec5 = std::array<double, 5>;

const double kSqrt3 = std::sqrt(3.0);

/// Symmetric bilinear form whose quadratic form is the Veronese map.
Vec5 veronese_form(const Vec3& a, const Vec3& b)
{
    const double s = 2 * kSqrt3;
    return {(a[0] * b[1] + a[1] * b[0]) / s, (a[0] * b[2] + a[2] * b[0]) / s,
            (a[1] * b[2] + a[2] * b[1]) / s, (a[0] * b[0] - a[1] * b[1]) / s,
            (a[0] * b[0] + a[1] * b[1] - 2 * a[2] * b[2]) / 6};
}

Vec3 chart_point(double theta, double phi)
{
    return {kSqrt3 * std::sin(theta) * std::cos(phi), kSqrt3 * std::sin(theta) * std::sin(phi),
            kSqrt3 * std::cos(theta)};
}

}  // namespace

std::array<double, 5> veronese_point(double r, double theta, double phi)
{
    const Vec3 x = chart_point(theta, phi);
    Vec5 v = veronese_form(x, x);
    for (double& c : v)
        c *= r;
    return v;
}

SolutionSample veronese_sample(double t, double theta, double phi)
{
    const double r = veronese_law(t).R;
    const Vec3 x = chart_point(theta, phi);
    const std::array<Vec3, 2> e{
        Vec3{std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi), -std::sin(theta)},
        Vec3{-std::sin(phi), std::cos(phi), 0.0}};

    // Geodesic normal coordinates on the sphere of radius sqrt(3): first
    // derivatives e_i, second derivatives -delta_ij x / 3.
    Eigen::MatrixXd jac(5, 2);
    for (int i = 0; i < 2; ++i) {
        const Vec5 q = veronese_form(x, e[i]);
        for (int c = 0; c < 5; ++c)
            jac(c, i) = 2 * r * q[c];
    }
    const Vec5 vx = veronese_form(x, x);
    Eigen::Matrix<double, 5, 3> hess;
    for (int i = 0; i < 2; ++i)
        for (int j = i; j < 2; ++j) {
            const Vec5 q = veronese_form(e[i], e[j]);
            for (int c = 0; c < 5; ++c)
                hess(c, sym_index(i, j)) = r * (2 * q[c] - (i == j ? 2.0 / 3.0 : 0.0) * vx[c]);
        }

    const Eigen::MatrixXd nu = normal_frame(jac);
    const Eigen::MatrixXd g = jac.transpose() * jac;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    const Eigen::MatrixXd gis = es.operatorInverseSqrt();
    std::vector<Eigen::MatrixXd> slices;
    for (int a = 0; a < 3; ++a) {
        Eigen::Matrix2d hc;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                hc(i, j) = hess.col(sym_index(i, j)).dot(nu.col(a));
        Eigen::MatrixXd s = gis * hc * gis;
        slices.push_back(0.5 * (s + s.transpose()));
    }

    SolutionSample out;
    out.position.assign(5, 0.0);
    for (int c = 0; c < 5; ++c)
        out.position[c] = r * vx[c];
    out.pc = PointCurvature::from_slices(slices);
    out.scalars = scalars(out.pc);
    out.t = t;
    return out;
}

CapState cap_law(int n, double R_amb, double rho0, double t0, double t)
{
    if (n < 1 || !(R_amb > 0) || !(rho0 > 0) || !(rho0 < std::numbers::pi * R_amb))
        throw std::invalid_argument("cap_law needs n >= 1 and 0 < rho0 < pi R_amb");
    const double x = std::cos(rho0 / R_amb) * std::exp(n * (t - t0) / (R_amb * R_amb));
    CapState s;
    if (!(x >= -1.0 && x <= 1.0)) {
        s.extinct = true;
        return s;
    }
    s.rho = R_amb * std::acos(x);
    return s;
}

double homothetic_rate(const SolutionSpec& spec)
{
    switch (spec.kind) {
    case SolutionKind::Sphere:
        return spec.n;
    case SolutionKind::Cylinder:
        return spec.n - spec.m;
    case SolutionKind::Veronese:
    case SolutionKind::TorusSeed:
        return 2;
    case SolutionKind::GeodesicCapSphere:
        break;
    }
    throw std::invalid_argument("caps follow cap_law, not a homothetic radius");
}

double homothetic_radius2(const SolutionSpec& spec, double t)
{
    return spec.radius * spec.radius - 2 * homothetic_rate(spec) * (t - spec.t0);
}

DiscreteImmersion seed_immersion(const SolutionSpec& spec, const ParamGrid& grid, double t)
{
    spec.validate();
    grid.validate();
    const Topology topo = grid.topology;
    auto reject = [&] {
        throw std::invalid_argument("cannot seed '" + std::string(solution_name(spec.kind)) + "' with n=" +
                                    std::to_string(spec.n) + " on a " + std::string(topology_name(topo)) +
                                    " grid");
    };
    switch (spec.kind) {
    case SolutionKind::Sphere:
        if (!((spec.n == 1 && topo == Topology::Circle) || (spec.n == 2 && topo == Topology::LatLongSphere)))
            reject();
        break;
    case SolutionKind::Veronese:
        if (topo != Topology::LatLongSphere)
            reject();
        break;
    case SolutionKind::Cylinder:
        if (spec.n != 2 || spec.m != 1 || topo != Topology::Torus2)
            reject();
        break;
    case SolutionKind::TorusSeed:
        if (topo != Topology::Torus2)
            reject();
        break;
    case SolutionKind::GeodesicCapSphere:
        reject();
    }

    const double R2 = homothetic_radius2(spec, t);
    if (!(R2 > 0))
        throw std::invalid_argument("the solution has already vanished at t = " + format17(t));
    // TorusSeed: R^2 = 2 a^2 with a the radius of each circle factor.
    const double R = spec.kind == SolutionKind::TorusSeed ? std::sqrt(R2 / 2) : std::sqrt(R2);

    DiscreteImmersion im;
    im.grid = grid;
    im.n = spec.n;
    im.k = spec.k;
    im.t = t;
    const int dim = im.ambient_dim();
    im.positions.assign(static_cast<std::size_t>(grid.size()) * dim, 0.0);
    const double amp = spec.perturbation.amplitude;
    const int mode = spec.perturbation.mode;

    for (int i = 0; i < grid.res[0]; ++i) {
        const double u0 = grid.coord(0, i);
        const double bump = amp * std::cos(mode * u0);
        for (int j = 0; j < grid.res[1]; ++j) {
            const double u1 = grid.coord(1, j);
            auto p = im.point(static_cast<long>(i) * grid.res[1] + j);
            switch (spec.kind) {
            case SolutionKind::Sphere:
                if (spec.n == 1) {
                    p[0] = R * (1 + bump) * std::cos(u0);
                    p[1] = R * (1 + bump) * std::sin(u0);
                }
                else {
                    const double rr = R * (1 + bump);
                    p[0] = rr * std::sin(u0) * std::cos(u1);
                    p[1] = rr * std::sin(u0) * std::sin(u1);
                    p[2] = rr * std::cos(u0);
                }
                break;
            case SolutionKind::Veronese: {
                const auto v = veronese_point(R * (1 + bump), u0, u1);
                std::copy(v.begin(), v.end(), p.begin());
                break;
            }
            case SolutionKind::Cylinder:
                p[0] = R * (1 + bump) * std::cos(u0);
                p[1] = R * (1 + bump) * std::sin(u0);
                p[2] = spec.length * u1 / (2 * std::numbers::pi);
                break;
            case SolutionKind::TorusSeed: {
                const double a = R * (1 + bump);
                p[0] = a * std::cos(u0);
                p[1] = a * std::sin(u0);
                p[2] = a * std::cos(u1);
                p[3] = a * std::sin(u1);
                break;
            }
            case SolutionKind::GeodesicCapSphere:
                break;
            }
        }
    }
    if (spec.kind == SolutionKind::Cylinder) {
        im.period_shift[1].assign(dim, 0.0);
        im.period_shift[1][2] = spec.length;
    }
    return im;
}

}  // namespace mcf
