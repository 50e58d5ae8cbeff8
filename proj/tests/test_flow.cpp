#include "mcflow/errors.hpp"
#include "mcflow/exact.hpp"
#include "mcflow/flow.hpp"
#include "mcflow/trajectory_io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace mcf;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

/// Unit radius at time t.
DiscreteImmersion sphere_seed(int n_lat, int k = 1, double t = 0, double amp = 0, int mode = 0)
{
    SolutionSpec s;
    s.kind = SolutionKind::Sphere;
    s.t0 = t;
    s.n = 2;
    s.k = k;
    s.perturbation = {amp, mode};
    return seed_immersion(s, ParamGrid::lat_long(n_lat, 2 * n_lat), t);
}

DiscreteImmersion circle_seed(int N, double R = 1, double amp = 0, int mode = 0)
{
    SolutionSpec s;
    s.kind = SolutionKind::Sphere;
    s.n = 1;
    s.k = 1;
    s.radius = R;
    s.perturbation = {amp, mode};
    return seed_immersion(s, ParamGrid::circle(N), 0);
}

double radius_at(const DiscreteImmersion& im, long node)
{
    double r2 = 0;
    for (double x : im.point(node))
        r2 += x * x;
    return std::sqrt(r2);
}

double max_position_gap(const DiscreteImmersion& a, const DiscreteImmersion& b)
{
    double m = 0;
    for (std::size_t i = 0; i < a.positions.size(); ++i)
        m = std::max(m, std::abs(a.positions[i] - b.positions[i]));
    return m;
}

DiscreteImmersion flow_fixed(DiscreteImmersion im, double t_end, int steps, Integrator integ)
{
    const double dt = (t_end - im.t) / steps;
    for (int s = 0; s < steps; ++s)
        im = step(im, dt, integ);
    return im;
}

/// Records with only (t, maxH) filled from a prescribed |H|^2 law.
std::vector<DiagnosticsRecord> synthetic(const std::vector<double>& ts, auto maxH2, FlowMode mode,
                                         std::optional<double> T = {})
{
    std::vector<DiagnosticsRecord> out;
    for (double t : ts) {
        DiagnosticsRecord r;
        r.t = t;
        r.maxH = std::sqrt(maxH2(t));
        r.tIq = (mode == FlowMode::Ancient ? -t : *T - t) * maxH2(t);
        out.push_back(r);
    }
    return out;
}

std::vector<double> geometric_times(double from, double to, int count)
{
    std::vector<double> ts;
    for (int i = 0; i < count; ++i)
        ts.push_back(from * std::pow(to / from, static_cast<double>(i) / (count - 1)));
    return ts;
}

}  // namespace

TEST_CASE("config validation and names")
{
    FlowConfig c;
    CHECK_NOTHROW(c.validate());
    c.cfl = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.cfl = 1.5;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.max_steps = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.snapshot_every = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    CHECK(parse_integrator(integrator_name(Integrator::Euler)) == Integrator::Euler);
    CHECK(parse_mode(mode_name(FlowMode::Ancient)) == FlowMode::Ancient);
    CHECK_THROWS_AS(parse_integrator("leapfrog"), std::invalid_argument);
    CHECK(stop_name(StopReason::Blowup) == "blowup");
}

TEST_CASE("single steps against the exact shrinking laws")
{
    SUBCASE("unit circle, RK4, dt = 1e-4")
    {
        const auto im = circle_seed(256);
        const auto next = step(im, 1e-4, Integrator::RK4);
        CHECK(next.t == Approx(1e-4));
        for (long p = 0; p < next.nodes(); ++p)
            CHECK(std::abs(radius_at(next, p) - std::sqrt(1 - 2e-4)) <= 1e-10);
    }
    SUBCASE("unit 2-sphere in R^3, RK4, dt = 1e-4")
    {
        const auto im = sphere_seed(64);
        PolarFilter filter(im.grid);
        const auto next = step(im, 1e-4, Integrator::RK4, &filter);
        for (long p = 0; p < next.nodes(); ++p)
            CHECK(std::abs(radius_at(next, p) - std::sqrt(1 - 4e-4)) <= 1e-9);
    }
    SUBCASE("flat factor of a cylinder does not move")
    {
        SolutionSpec cyl;
        cyl.kind = SolutionKind::Cylinder;
        cyl.n = 2;
        cyl.m = 1;
        const auto im = seed_immersion(cyl, ParamGrid::torus(32, 16), 0);
        const auto next = step(im, 1e-3, Integrator::RK4);
        for (long p = 0; p < im.nodes(); ++p) {
            CHECK(std::abs(next.point(p)[2] - im.point(p)[2]) <= 1e-14);
            CHECK(std::hypot(next.point(p)[0], next.point(p)[1]) < std::hypot(im.point(p)[0], im.point(p)[1]));
        }
    }
}

TEST_CASE("time step bound")
{
    SUBCASE("closed formula")
    {
        const auto im = sphere_seed(32);
        const auto geo = geometry_field(im);
        double h = std::numeric_limits<double>::infinity();
        double m = 0;
        for (const auto& nd : geo.nodes) {
            h = std::min(h, nd.spacing);
            m = std::max(m, nd.normh2);
        }
        CHECK(cfl_dt(geo, 0.2) == Approx(0.2 * h * h / (4 * (1 + m * h * h))).epsilon(1e-14));
        CHECK(min_spacing(geo) == h);
        CHECK(max_normh2(geo) == m);
    }
    SUBCASE("doubling the resolution quarters dt")
    {
        CHECK(cfl_dt(circle_seed(128), 0.2) / cfl_dt(circle_seed(256), 0.2) == Approx(4).epsilon(0.01));
        // the curvature factor 1 + 2h^2 shifts the ratio by 1.4% at 32 rows, 0.4% at 64
        CHECK(cfl_dt(sphere_seed(64), 0.2) / cfl_dt(sphere_seed(128), 0.2) == Approx(4).epsilon(0.01));
    }
    SUBCASE("dt decreases monotonically as curvature grows")
    {
        // fixed parameter grid, shrinking radius: spacing falls and |h|^2 rises
        double prev = std::numeric_limits<double>::infinity();
        for (double R = 1; R > 1e-3; R /= 2) {
            const double dt = cfl_dt(circle_seed(64, R), 0.2);
            CHECK(dt < prev);
            prev = dt;
        }
        CHECK(prev < 1e-7);
    }
    SUBCASE("bit-exact on the 64x128 sphere")
    {
        const auto im = sphere_seed(64, 2);
        const double a = cfl_dt(im, 0.2);
        const double b = cfl_dt(im, 0.2);
        const double c = cfl_dt(geometry_field(im, Exec::Serial), 0.2);
        CHECK(a == b);
        CHECK(a == c);
    }
}

TEST_CASE("integrator order in time")
{
    // same spatial grid for every run, so differences isolate the time error
    const auto seed = circle_seed(32, 1, 0.1, 3);
    const double t_end = 0.05;
    const auto ref = flow_fixed(seed, t_end, 1600, Integrator::RK4);

    const double r1 = max_position_gap(flow_fixed(seed, t_end, 50, Integrator::RK4), ref);
    const double r2 = max_position_gap(flow_fixed(seed, t_end, 100, Integrator::RK4), ref);
    MESSAGE("RK4 errors ", r1, " ", r2);
    CHECK(std::log2(r1 / r2) >= 3.5);

    const auto eref = flow_fixed(seed, t_end, 6400, Integrator::RK4);
    const double e1 = max_position_gap(flow_fixed(seed, t_end, 200, Integrator::Euler), eref);
    const double e2 = max_position_gap(flow_fixed(seed, t_end, 400, Integrator::Euler), eref);
    CHECK(std::log2(e1 / e2) == Approx(1).epsilon(0.1));
}

TEST_CASE("parabolic scaling and translation equivariance of a step")
{
    const auto base = sphere_seed(24, 1, 0, 0.1, 2);
    const double lambda = 2.5;
    const std::array<double, 3> shift{0.3, -1.2, 4.0};
    auto transform = [&](DiscreteImmersion im) {
        for (long p = 0; p < im.nodes(); ++p)
            for (int c = 0; c < 3; ++c)
                im.point(p)[c] = lambda * im.point(p)[c] + shift[static_cast<std::size_t>(c)];
        return im;
    };
    PolarFilter filter(base.grid);
    const double dt = 1e-3;
    const auto a = transform(step(base, dt, Integrator::RK4, &filter));
    const auto b = step(transform(base), lambda * lambda * dt, Integrator::RK4, &filter);
    double scale = 0;
    for (double x : a.positions)
        scale = std::max(scale, std::abs(x));
    CHECK(max_position_gap(a, b) <= 1e-10 * scale);
}

TEST_CASE("polar filter")
{
    const auto grid = ParamGrid::lat_long(16, 32);
    PolarFilter f(grid);
    for (int i = 0; i < 16; ++i) {
        CHECK(f.weight(i, 0) == 1);
        CHECK(f.weight(i, 1) == 1);
        for (int m = 2; m <= 16; ++m) {
            CHECK(f.weight(i, m) <= 1);
            CHECK(f.weight(i, m) > 0);
            CHECK(f.weight(i, m) <= f.weight(i, m - 1));
        }
    }
    // nearest the equator nothing is damped, nearest the poles the top mode is
    CHECK(f.weight(8, 16) == Approx(std::pow(std::sin(grid.coord(0, 8)), 2)));
    CHECK(f.weight(0, 16) < 0.05);

    // modes 0 and 1 are exact: a sphere's position field passes unchanged
    const auto im = sphere_seed(16);
    std::vector<double> field = im.positions;
    f.apply(field, 3, Exec::Serial);
    for (std::size_t i = 0; i < field.size(); ++i)
        CHECK(field[i] == Approx(im.positions[i]).epsilon(1e-13).scale(1));

    // serial and parallel application agree bit for bit
    std::mt19937_64 rng(3);
    std::normal_distribution<double> N01;
    std::vector<double> noise(static_cast<std::size_t>(grid.size()) * 2);
    for (double& x : noise)
        x = N01(rng);
    auto a = noise;
    auto b = noise;
    f.apply(a, 2, Exec::Serial);
    f.apply(b, 2, Exec::Parallel);
    CHECK(a == b);
    CHECK_THROWS_AS(PolarFilter(ParamGrid::torus(8, 8)), std::invalid_argument);
}

TEST_CASE("forward sphere run")
{
    FlowConfig cfg;
    cfg.t_end = 0.1875;
    cfg.snapshot_every = 20;
    const auto seed = sphere_seed(32, 2);
    const auto traj = run(seed, cfg);
    REQUIRE(traj.stop == StopReason::EndTime);
    REQUIRE(traj.diagnostics.size() == traj.snapshots.size());
    CHECK(traj.snapshots.back().t == cfg.t_end);
    const double ratio = traj.diagnostics.back().area / traj.diagnostics.front().area;
    CHECK(std::abs(ratio / 0.25 - 1) <= 0.01);
    for (std::size_t i = 1; i < traj.diagnostics.size(); ++i) {
        CHECK(traj.diagnostics[i].t > traj.diagnostics[i - 1].t);
        CHECK(traj.diagnostics[i].area < traj.diagnostics[i - 1].area);
    }
    for (const auto& r : traj.diagnostics) {
        REQUIRE(r.gaussBonnet);
        CHECK(std::abs(*r.gaussBonnet / (4 * kPi) - 1) <= 5e-3);
        CHECK(r.maxRatio == Approx(0.5).epsilon(1e-3));
    }
    // forward mode extrapolates the singular time of 1 - 4t
    REQUIRE(traj.T_singular);
    CHECK(*traj.T_singular == Approx(0.25).epsilon(1e-3));
    // (T - t)|H|^2 = (1/4 - t) 4 / (1 - 4t) = 1
    CHECK(traj.diagnostics.front().tIq == Approx(1).epsilon(2e-3));

    SUBCASE("serial and parallel runs are identical")
    {
        FlowConfig s = cfg;
        s.exec = Exec::Serial;
        s.t_end = 0.02;
        FlowConfig p = s;
        p.exec = Exec::Parallel;
        const auto a = run(seed, s);
        const auto b = run(seed, p);
        REQUIRE(a.snapshots.size() == b.snapshots.size());
        for (std::size_t i = 0; i < a.snapshots.size(); ++i)
            CHECK(a.snapshots[i].positions == b.snapshots[i].positions);
        std::ostringstream ca, cb;
        write_diagnostics_csv(ca, a.diagnostics);
        write_diagnostics_csv(cb, b.diagnostics);
        CHECK(ca.str() == cb.str());
    }
}

TEST_CASE("ancient sphere run")
{
    // R^2 = -4t: unit radius at t = -1/4
    FlowConfig cfg;
    cfg.mode = FlowMode::Ancient;
    cfg.t_end = -0.1;
    cfg.snapshot_every = 4;
    cfg.record_times = {-0.2, -0.15};
    const auto traj = run(sphere_seed(24, 1, -0.25), cfg);
    REQUIRE(traj.stop == StopReason::EndTime);
    CHECK_FALSE(traj.T_singular);

    const auto& d = traj.diagnostics;
    for (const auto& r : d)
        CHECK(std::abs(r.tIq - 1) <= 1e-3);
    for (double mark : cfg.record_times) {
        const bool hit = std::any_of(d.begin(), d.end(), [&](const auto& r) { return r.t == mark; });
        CHECK(hit);
    }

    // area decay: central differences of the area against the integral of |H|^2
    for (std::size_t i = 1; i + 1 < d.size(); ++i) {
        const double dmu = (d[i + 1].area - d[i - 1].area) / (d[i + 1].t - d[i - 1].t);
        CHECK(std::abs(-dmu / d[i].intH2 - 1) <= 0.01);
    }

    const auto tc = classify_type(traj);
    CHECK(tc.type_I);
    CHECK(tc.C2 == Approx(1).epsilon(1e-3));

    // mu = 4 pi R^2 = 16 pi |t|
    const auto fit = fit_area_decay(d, {}, 0);
    CHECK(fit.r == Approx(1).epsilon(1e-3));
    CHECK(fit.c == Approx(16 * kPi).epsilon(1e-2));
}

TEST_CASE("perturbed sphere keeps its pinching")
{
    FlowConfig cfg;
    cfg.t_end = 0.15;
    cfg.snapshot_every = 5;
    const auto traj = run(sphere_seed(24, 1, 0, 0.05, 2), cfg);
    REQUIRE(traj.stop == StopReason::EndTime);
    const auto& d = traj.diagnostics;
    CHECK(d.front().maxQ < 0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(d[i].maxQ < 1e-6 * d[i].maxH * d[i].maxH);
        if (i > 0) {
            CHECK(d[i].maxRatio <= d[i - 1].maxRatio + 1e-6);
            CHECK(d[i].phi <= d[i - 1].phi + 1e-8);
        }
    }
    CHECK(d.back().maxRatio < d.front().maxRatio);
    CHECK(d.back().maxRatio > 0.5);
}

TEST_CASE("run bookkeeping")
{
    SUBCASE("t_end before any step gives a single snapshot")
    {
        FlowConfig cfg;
        cfg.t_end = -1;
        const auto traj = run(circle_seed(16), cfg);
        CHECK(traj.snapshots.size() == 1);
        CHECK(traj.stop == StopReason::EndTime);
    }
    SUBCASE("max steps")
    {
        FlowConfig cfg;
        cfg.t_end = 1;
        cfg.max_steps = 7;
        cfg.snapshot_every = 3;
        const auto traj = run(circle_seed(16), cfg);
        CHECK(traj.stop == StopReason::MaxSteps);
        REQUIRE(traj.diagnostics.size() == 4);  // steps 0, 3, 6, 7
        CHECK(traj.diagnostics.back().step == 7);
    }
    SUBCASE("blowup cap")
    {
        FlowConfig cfg;
        cfg.t_end = 1;
        cfg.stop_on_blowup = 4;  // |h|^2 = 1/R^2 passes 4 once R < 1/2
        const auto traj = run(circle_seed(32), cfg);
        CHECK(traj.stop == StopReason::Blowup);
        CHECK_FALSE(traj.message.empty());
        const double R2 = 1 - 2 * traj.snapshots.back().t;
        CHECK(R2 < 0.25);
        CHECK(R2 > 0.2);
    }
    SUBCASE("a pinching torus stops as degenerate")
    {
        // both circle radii carry the factor 1 + 0.8 cos(u): the second circle
        // collapses first near u = pi while the first direction stays finite
        SolutionSpec tor;
        tor.kind = SolutionKind::TorusSeed;
        tor.k = 2;
        tor.perturbation = {0.8, 1};
        FlowConfig cfg;
        cfg.t_end = 1;
        cfg.snapshot_every = 1000;
        const auto traj = run(seed_immersion(tor, ParamGrid::torus(16, 16), 0), cfg);
        CHECK(traj.stop == StopReason::Degenerate);
        CHECK(traj.message.find("node") != std::string::npos);
        CHECK(traj.snapshots.back().t < 1);
        CHECK_NOTHROW(geometry_field(traj.snapshots.back()));
    }
    SUBCASE("degenerate seed throws")
    {
        auto seed = circle_seed(16);
        std::fill(seed.positions.begin(), seed.positions.end(), 1.0);
        CHECK_THROWS_AS(run(seed, FlowConfig{}), DegenerateGeometryError);
    }
}

TEST_CASE("f_sigma functional")
{
    const auto sphere = sphere_seed(24);
    CHECK(fsigma_integral(sphere, 0.1, 10).phi == Approx(0).scale(1).epsilon(1e-20));

    const auto bumpy = sphere_seed(24, 1, 0, 0.1, 2);
    const auto geo = geometry_field(bumpy);
    const auto base = fsigma_integral(geo, bumpy, 0.1, 1);
    for (double lambda : {0.5, 3.0}) {
        auto scaled = bumpy;
        for (double& x : scaled.positions)
            x *= lambda;
        const auto st = fsigma_integral(scaled, 0.1, 1);
        CHECK(st.max_f == Approx(base.max_f * std::pow(lambda, -0.2)).epsilon(1e-10));
        // phi with p = 1 carries the area factor lambda^2 as well
        CHECK(st.phi == Approx(base.phi * std::pow(lambda, 2 - 0.2)).epsilon(1e-10));
    }

    // independent evaluation of max f and phi
    double maxf = 0;
    std::vector<double> fp;
    for (const auto& nd : geo.nodes) {
        const double f = std::max(0.0, nd.normh2 - nd.normH2 / 2) / std::pow(nd.normH2, 0.9);
        maxf = std::max(maxf, f);
        fp.push_back(std::pow(f, 3));
    }
    const auto st3 = fsigma_integral(geo, bumpy, 0.1, 3);
    CHECK(st3.max_f == Approx(maxf).epsilon(1e-14));
    CHECK(st3.phi == Approx(integrate(geo, bumpy, fp)).epsilon(1e-12));

    // a flat plane: H vanishes everywhere
    DiscreteImmersion plane;
    plane.grid = ParamGrid::torus(8, 8);
    plane.n = 2;
    plane.k = 1;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            plane.positions.push_back(i);
            plane.positions.push_back(j);
            plane.positions.push_back(0);
        }
    plane.period_shift[0] = {8, 0, 0};
    plane.period_shift[1] = {0, 8, 0};
    CHECK_THROWS_AS(fsigma_integral(plane, 0.1, 10), MinimalPointError);
    CHECK_THROWS_AS(fsigma_integral(sphere, 0, 10), std::invalid_argument);
    const auto d = diagnostics(plane, PinchSpec{}, FlowMode::Forward);
    CHECK(std::isnan(d.phi));
    CHECK(std::isnan(d.tIq));
}

TEST_CASE("type classification")
{
    const auto ts = geometric_times(-100, -0.01, 40);
    SUBCASE("sphere law")
    {
        for (int n : {1, 2, 5}) {
            const auto tc = classify_type(synthetic(ts, [n](double t) { return -n / (2 * t); }, FlowMode::Ancient),
                                          FlowMode::Ancient);
            CHECK(tc.type_I);
            CHECK(tc.C2 == Approx(n / 2.0).epsilon(1e-12));
            CHECK(tc.C == Approx(std::sqrt(n / 2.0)));
        }
    }
    SUBCASE("cylinder law")
    {
        const int n = 4, m = 1;
        const auto tc = classify_type(
            synthetic(ts, [&](double t) { return -(n - m) / (2 * t); }, FlowMode::Ancient), FlowMode::Ancient);
        CHECK(tc.type_I);
        CHECK(tc.C2 == Approx((n - m) / 2.0).epsilon(1e-12));
    }
    SUBCASE("Veronese law")
    {
        const auto tc = classify_type(synthetic(ts, [](double t) { return 4 / (-4 * t); }, FlowMode::Ancient),
                                      FlowMode::Ancient);
        CHECK(tc.type_I);
        CHECK(tc.C2 == Approx(1).epsilon(1e-12));
    }
    SUBCASE("logarithmic growth is type II")
    {
        const auto tc = classify_type(
            synthetic(ts, [](double t) { return std::log(-t + 1) / -t; }, FlowMode::Ancient), FlowMode::Ancient);
        CHECK_FALSE(tc.type_I);
        CHECK(tc.growth > 0.05);
    }
    SUBCASE("forward mode")
    {
        const double T = 1;
        std::vector<double> fts;
        for (int i = 0; i < 20; ++i)
            fts.push_back(T - std::pow(0.7, i));
        CHECK(classify_type(synthetic(fts, [&](double t) { return 3 / (T - t); }, FlowMode::Forward, T),
                            FlowMode::Forward)
                  .type_I);
        CHECK_FALSE(classify_type(
                        synthetic(fts, [&](double t) { return 1 / std::pow(T - t, 1.5); }, FlowMode::Forward, T),
                        FlowMode::Forward)
                        .type_I);
    }
    SUBCASE("too few records")
    {
        CHECK_THROWS_AS(classify_type(synthetic(geometric_times(-2, -1, 9), [](double t) { return -1 / t; },
                                                FlowMode::Ancient),
                                      FlowMode::Ancient),
                        std::invalid_argument);
    }
}

TEST_CASE("singular time and area fits on synthetic data")
{
    const auto recs = synthetic({0, 0.1, 0.2}, [](double t) { return 1 / (0.7 - t); }, FlowMode::Forward, 0.7);
    REQUIRE(estimate_singular_time(recs));
    CHECK(*estimate_singular_time(recs) == Approx(0.7).epsilon(1e-12));
    CHECK_FALSE(estimate_singular_time(std::span(recs).first(1)));

    std::vector<DiagnosticsRecord> area;
    for (double t : geometric_times(-10, -0.1, 12)) {
        DiagnosticsRecord r;
        r.t = t;
        r.area = 3.5 * std::pow(-t, 1.7);
        area.push_back(r);
    }
    const auto fit = fit_area_decay(area, {}, 0);
    CHECK(fit.r == Approx(1.7).epsilon(1e-12));
    CHECK(fit.c == Approx(3.5).epsilon(1e-12));
    CHECK(fit.points == 12);
    const auto windowed = fit_area_decay(area, {-5, -0.5}, 0);
    CHECK(windowed.points < 12);
    CHECK(windowed.r == Approx(1.7).epsilon(1e-12));
    CHECK_THROWS_AS(fit_area_decay(area, {-0.01, 0}, 0), std::invalid_argument);
}

TEST_CASE("type-II blow-up")
{
    FlowConfig cfg;
    cfg.t_end = 0.12;
    cfg.snapshot_every = 10;
    const auto traj = run(sphere_seed(24, 1, 0, 0.05, 2), cfg);
    REQUIRE(traj.T_singular);
    const auto res = blowup_type2(traj, {});
    REQUIRE(res.trajectory.snapshots.size() == traj.snapshots.size());

    const auto& base = res.trajectory.diagnostics[res.base_index];
    CHECK(base.t == 0);
    CHECK(std::abs(base.maxH - 1) <= 1e-10);

    // the base point maximises (T - t)|H|^2
    double best = -1;
    for (const auto& im : traj.snapshots) {
        const auto geo = geometry_field(im);
        for (const auto& nd : geo.nodes)
            best = std::max(best, (*traj.T_singular - im.t) * nd.normH2);
    }
    CHECK(res.L * (*traj.T_singular - res.base_time) == Approx(best).epsilon(1e-14));
    for (double x : res.trajectory.snapshots[res.base_index].point(res.base_node))
        CHECK(x == 0);

    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        // times are relabelled by L
        CHECK(res.trajectory.snapshots[s].t ==
              Approx((traj.snapshots[s].t - res.base_time) * res.L).epsilon(1e-14).scale(1));
        if (s > 0) {
            const double dtau = res.trajectory.snapshots[s].t - res.trajectory.snapshots[s - 1].t;
            const double dt = traj.snapshots[s].t - traj.snapshots[s - 1].t;
            CHECK(dtau == Approx(dt * res.L).epsilon(1e-12));
        }
        // the pinching ratio is scale invariant; compare by re-differencing both snapshots
        const auto a = geometry_field(traj.snapshots[s]);
        const auto b = geometry_field(res.trajectory.snapshots[s]);
        for (std::size_t p = 0; p < a.nodes.size(); ++p)
            CHECK(std::abs(b.nodes[p].normh2 / b.nodes[p].normH2 - a.nodes[p].normh2 / a.nodes[p].normH2) <= 1e-12);
    }

    SUBCASE("windowing and ties")
    {
        const double t_mid = traj.snapshots[traj.snapshots.size() / 2].t;
        const auto early = blowup_type2(traj, {-1, t_mid});
        CHECK(early.base_time <= t_mid);
        CHECK_THROWS_AS(blowup_type2(traj, {5, 6}), std::invalid_argument);

        // exact ties: quadrants generated by exact quarter turns make nodes
        // i, i+4, i+8, i+12 bitwise equal, and doubling the radius at four
        // times the distance from t = 0 leaves (-t)|H|^2 bitwise unchanged
        auto polygon = [](double scale, double t) {
            DiscreteImmersion im;
            im.grid = ParamGrid::circle(16);
            im.t = t;
            std::vector<std::array<double, 2>> q;
            for (int i = 0; i < 4; ++i)
                q.push_back({std::cos(i * kPi / 8), std::sin(i * kPi / 8)});
            for (int r = 0; r < 4; ++r)
                for (auto p : q) {
                    for (int turn = 0; turn < r; ++turn)
                        p = {-p[1], p[0]};
                    im.positions.push_back(scale * p[0]);
                    im.positions.push_back(scale * p[1]);
                }
            return im;
        };
        Trajectory ct;
        ct.mode = FlowMode::Ancient;
        ct.snapshots = {polygon(2, -4), polygon(1, -1)};
        for (const auto& im : ct.snapshots)
            ct.diagnostics.push_back(diagnostics(im, PinchSpec{}, FlowMode::Ancient));
        const auto g0 = geometry_field(ct.snapshots[0]);
        const auto g1 = geometry_field(ct.snapshots[1]);
        double best = 0;
        for (const auto& nd : g0.nodes)
            best = std::max(best, 4 * nd.normH2);
        long first = -1;
        int ties = 0;
        for (std::size_t p = 0; p < g0.nodes.size(); ++p) {
            REQUIRE(4 * g0.nodes[p].normH2 == 1 * g1.nodes[p].normH2);
            if (4 * g0.nodes[p].normH2 == best) {
                ++ties;
                if (first < 0)
                    first = static_cast<long>(p);
            }
        }
        REQUIRE(ties >= 4);
        const auto tie = blowup_type2(ct, {});
        CHECK(tie.base_index == 0);
        CHECK(tie.base_node == first);
    }
}

TEST_CASE("type-I rescaling")
{
    FlowConfig cfg;
    cfg.mode = FlowMode::Ancient;
    cfg.t_end = -0.0625;
    cfg.snapshot_every = 10;
    cfg.record_times = {-0.125};
    const auto traj = run(sphere_seed(24, 1, -0.25), cfg);

    const std::vector<double> taus{-2, -1.5, -1};
    const auto res = rescale_type1(traj, -0.125, taus);
    REQUIRE(res.trajectory.snapshots.size() == 3);
    CHECK(res.L == Approx(8));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(res.trajectory.snapshots[i].t == taus[i]);
        // R(t) = sqrt(-4t): rescaled radius sqrt(-4 tau)
        CHECK(mean_radius(res.trajectory.snapshots[i]) == Approx(std::sqrt(-4 * taus[i])).epsilon(1e-3));
    }

    // t_j = -1 with a trajectory stored at t = -1 is the identity on that slice
    Trajectory unit;
    unit.mode = FlowMode::Ancient;
    unit.snapshots.push_back(sphere_seed(16, 1, -1));
    unit.diagnostics.push_back(diagnostics(unit.snapshots.back(), PinchSpec{}, FlowMode::Ancient));
    const std::vector<double> one{-1};
    const auto id = rescale_type1(unit, -1, one);
    CHECK(id.trajectory.snapshots[0].positions == unit.snapshots[0].positions);

    CHECK_THROWS_AS(rescale_type1(traj, 0.1, taus), std::invalid_argument);
    const std::vector<double> far{-10};
    CHECK_THROWS_AS(rescale_type1(traj, -0.125, far), std::invalid_argument);

    const auto dt = default_type1_taus(5);
    CHECK(dt == std::vector<double>{-2, -1.75, -1.5, -1.25, -1});
}

TEST_CASE("diagnostics tables")
{
    FlowConfig cfg;
    cfg.t_end = 0.01;
    cfg.snapshot_every = 3;
    const auto traj = run(sphere_seed(16), cfg);
    std::stringstream ss;
    write_diagnostics_csv(ss, traj.diagnostics);
    const std::string text = ss.str();
    CHECK(text.rfind("t,area,intH2,maxH,minH,maxRatio,minQ,phi,gaussBonnet,tIq\n", 0) == 0);
    const auto back = read_diagnostics_csv(ss);
    REQUIRE(back.size() == traj.diagnostics.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].t == traj.diagnostics[i].t);
        CHECK(back[i].area == traj.diagnostics[i].area);
        CHECK(back[i].phi == traj.diagnostics[i].phi);
        CHECK(*back[i].gaussBonnet == *traj.diagnostics[i].gaussBonnet);
    }

    // gaussBonnet is empty for curves
    const auto c = run(circle_seed(16), cfg);
    std::stringstream cs;
    write_diagnostics_csv(cs, c.diagnostics);
    std::string second;
    std::getline(cs, second);
    std::getline(cs, second);
    CHECK(second.find(",,") != std::string::npos);
    cs.seekg(0);
    CHECK_FALSE(read_diagnostics_csv(cs).front().gaussBonnet);

    std::istringstream bad_header("t,area\n1,2\n");
    CHECK_THROWS_AS(read_diagnostics_csv(bad_header), DataError);
    std::istringstream bad_row("t,area,intH2,maxH,minH,maxRatio,minQ,phi,gaussBonnet,tIq\n1,2,3\n");
    CHECK_THROWS_AS(read_diagnostics_csv(bad_row), DataError);

    std::ostringstream extra;
    write_extra_csv(extra, traj.diagnostics);
    CHECK(extra.str().rfind("t,step,maxQ,maxF,phiAlt,gammaRatio\n", 0) == 0);
}

TEST_CASE("trajectory directories")
{
    FlowConfig cfg;
    cfg.t_end = 0.02;
    cfg.snapshot_every = 5;
    const auto traj = run(sphere_seed(16, 1, 0, 0.05, 2), cfg);
    oracle::TempDir dir("traj");
    const auto files = save_trajectory(dir.path(), traj);
    CHECK(files.size() == traj.snapshots.size() + 3);
    const auto back = load_trajectory(dir.path());
    CHECK(back.mode == traj.mode);
    CHECK(back.stop == traj.stop);
    REQUIRE(back.T_singular.has_value() == traj.T_singular.has_value());
    if (back.T_singular)
        CHECK(*back.T_singular == *traj.T_singular);
    REQUIRE(back.snapshots.size() == traj.snapshots.size());
    for (std::size_t i = 0; i < back.snapshots.size(); ++i)
        CHECK(back.snapshots[i].positions == traj.snapshots[i].positions);

    // a missing snapshot is a data error
    REQUIRE(std::filesystem::remove(dir.path() / "snapshots" / "snap_000001.mcf"));
    CHECK_THROWS_AS(load_trajectory(dir.path()), DataError);
    CHECK_THROWS_AS(load_trajectory(dir.path() / "nowhere"), DataError);
}
