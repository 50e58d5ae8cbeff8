#include "mcflow/flow.hpp"

#include "mcflow/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mcf {

std::string_view integrator_name(Integrator i)
{
    return i == Integrator::RK4 ? "rk4" : "euler";
}

Integrator parse_integrator(std::string_view name)
{
    if (name == "rk4")
        return Integrator::RK4;
    if (name == "euler")
        return Integrator::Euler;
    throw std::invalid_argument("unknown integrator '" + std::string(name) + "'");
}

std::string_view mode_name(FlowMode m)
{
    return m == FlowMode::Ancient ? "ancient" : "forward";
}

FlowMode parse_mode(std::string_view name)
{
    if (name == "ancient")
        return FlowMode::Ancient;
    if (name == "forward")
        return FlowMode::Forward;
    throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

std::string_view stop_name(StopReason r)
{
    switch (r) {
    case StopReason::EndTime:
        return "end-time";
    case StopReason::MaxSteps:
        return "max-steps";
    case StopReason::Blowup:
        return "blowup";
    case StopReason::Degenerate:
        return "degenerate";
    }
    return "?";
}

void FlowConfig::validate() const
{
    if (!(cfl > 0 && cfl <= 1))
        throw std::invalid_argument("cfl must lie in (0, 1]");
    if (max_steps < 1)
        throw std::invalid_argument("max_steps must be >= 1");
    if (snapshot_every < 1)
        throw std::invalid_argument("snapshot_every must be >= 1");
    if (!std::isfinite(t_end))
        throw std::invalid_argument("t_end must be finite");
    if (!(stop_on_blowup > 0))
        throw std::invalid_argument("blowup cap must be positive");
    pinch.validate();
}

// ---------------------------------------------------------------- polar filter

struct PolarFilter::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

PolarFilter::PolarFilter(const ParamGrid& grid)
    : rows_(grid.res[0]), cols_(grid.res[1]), modes_(grid.res[1] / 2 + 1), plans_(std::make_unique<Plans>())
{
    if (grid.topology != Topology::LatLongSphere)
        throw std::invalid_argument("the polar filter needs a lat-long grid");
    const double dphi = grid.spacing[1];
    auto symbol = [dphi](int m) {
        return (30 - 32 * std::cos(m * dphi) + 2 * std::cos(2 * m * dphi)) / 12;
    };
    const double smax = symbol(cols_ / 2);
    weights_.assign(static_cast<std::size_t>(rows_) * modes_, 1.0);
    for (int i = 0; i < rows_; ++i) {
        const double s2 = std::pow(std::sin(grid.coord(0, i)), 2);
        for (int m = 1; m < modes_; ++m)
            weights_[static_cast<std::size_t>(i) * modes_ + m] = std::min(1.0, smax * s2 / symbol(m));
    }

    std::vector<double> re(cols_);
    std::vector<std::complex<double>> co(modes_);
    auto* cp = reinterpret_cast<fftw_complex*>(co.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plans_->forward = fftw_plan_dft_r2c_1d(cols_, re.data(), cp, flags);
    plans_->backward = fftw_plan_dft_c2r_1d(cols_, cp, re.data(), flags);
    if (!plans_->forward || !plans_->backward)
        throw std::runtime_error("FFTW planning failed");
}

PolarFilter::~PolarFilter()
{
    if (plans_) {
        if (plans_->forward)
            fftw_destroy_plan(plans_->forward);
        if (plans_->backward)
            fftw_destroy_plan(plans_->backward);
    }
}

void PolarFilter::apply(std::span<double> field, int dim, Exec exec) const
{
    if (field.size() != static_cast<std::size_t>(rows_) * cols_ * dim)
        throw std::invalid_argument("polar filter: field does not match grid");
    auto row_pass = [&](int i, std::vector<double>& re, std::vector<std::complex<double>>& co) {
        const double* w = weights_.data() + static_cast<std::size_t>(i) * modes_;
        bool trivial = true;
        for (int m = 0; m < modes_; ++m)
            trivial = trivial && w[m] == 1.0;
        if (trivial)
            return;
        auto* cp = reinterpret_cast<fftw_complex*>(co.data());
        for (int c = 0; c < dim; ++c) {
            double* base = field.data() + static_cast<std::size_t>(i) * cols_ * dim + c;
            for (int j = 0; j < cols_; ++j)
                re[j] = base[static_cast<std::size_t>(j) * dim];
            fftw_execute_dft_r2c(plans_->forward, re.data(), cp);
            for (int m = 0; m < modes_; ++m)
                co[m] *= w[m] / cols_;
            fftw_execute_dft_c2r(plans_->backward, cp, re.data());
            for (int j = 0; j < cols_; ++j)
                base[static_cast<std::size_t>(j) * dim] = re[j];
        }
    };
    if (exec == Exec::Serial) {
        std::vector<double> re(cols_);
        std::vector<std::complex<double>> co(modes_);
        for (int i = 0; i < rows_; ++i)
            row_pass(i, re, co);
        return;
    }
#pragma omp parallel
    {
        std::vector<double> re(cols_);
        std::vector<std::complex<double>> co(modes_);
#pragma omp for schedule(static)
        for (int i = 0; i < rows_; ++i)
            row_pass(i, re, co);
    }
}

// ---------------------------------------------------------------- stepping

double min_spacing(const GeometryField& geo)
{
    double h = std::numeric_limits<double>::infinity();
    for (const auto& nd : geo.nodes)
        h = std::min(h, nd.spacing);
    return h;
}

double max_normh2(const GeometryField& geo)
{
    double m = 0;
    for (const auto& nd : geo.nodes)
        m = std::max(m, nd.normh2);
    return m;
}

double cfl_dt(const GeometryField& geo, double cfl)
{
    const double h = min_spacing(geo);
    const double h2 = h * h;
    return cfl * h2 / (2.0 * geo.n * (1.0 + max_normh2(geo) * h2));
}

double cfl_dt(const DiscreteImmersion& im, double cfl)
{
    return cfl_dt(geometry_field(im), cfl);
}

std::vector<double> velocity(const DiscreteImmersion& im, const PolarFilter* filter, Exec exec)
{
    GeometryField geo = geometry_field(im, exec);
    if (filter)
        filter->apply(geo.H, geo.dim, exec);
    return std::move(geo.H);
}

namespace {

/// out = base + a * v, elementwise.
void axpy(std::vector<double>& out, const std::vector<double>& base, double a, const std::vector<double>& v,
          Exec exec)
{
    const long count = static_cast<long>(base.size());
    out.resize(base.size());
    if (exec == Exec::Serial) {
        for (long i = 0; i < count; ++i)
            out[i] = base[i] + a * v[i];
        return;
    }
#pragma omp parallel for schedule(static)
    for (long i = 0; i < count; ++i)
        out[i] = base[i] + a * v[i];
}

}  // namespace

DiscreteImmersion step(const DiscreteImmersion& im, double dt, Integrator integrator, const PolarFilter* filter,
                       Exec exec, const std::vector<double>* k1)
{
    if (!(dt > 0) || !std::isfinite(dt))
        throw std::invalid_argument("step needs a positive finite dt");
    std::vector<double> own_k1;
    if (!k1) {
        own_k1 = velocity(im, filter, exec);
        k1 = &own_k1;
    }
    DiscreteImmersion out = im;
    out.t = im.t + dt;
    if (integrator == Integrator::Euler) {
        axpy(out.positions, im.positions, dt, *k1, exec);
        return out;
    }

    DiscreteImmersion stage = im;
    axpy(stage.positions, im.positions, 0.5 * dt, *k1, exec);
    const std::vector<double> k2 = velocity(stage, filter, exec);
    axpy(stage.positions, im.positions, 0.5 * dt, k2, exec);
    const std::vector<double> k3 = velocity(stage, filter, exec);
    axpy(stage.positions, im.positions, dt, k3, exec);
    const std::vector<double> k4 = velocity(stage, filter, exec);

    const long count = static_cast<long>(im.positions.size());
    const double w = dt / 6;
    const auto& a = *k1;
    auto combine = [&](long i) {
        out.positions[i] = im.positions[i] + w * (a[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    };
    if (exec == Exec::Serial) {
        for (long i = 0; i < count; ++i)
            combine(i);
    }
    else {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < count; ++i)
            combine(i);
    }
    return out;
}

// ---------------------------------------------------------------- functionals

FsigmaStats fsigma_integral(const GeometryField& geo, const DiscreteImmersion& im, double sigma, double p)
{
    if (!(sigma > 0 && sigma < 1) || !(p >= 1))
        throw std::invalid_argument("f_sigma needs 0 < sigma < 1 and p >= 1");
    double maxH2 = 0;
    for (const auto& nd : geo.nodes)
        maxH2 = std::max(maxH2, nd.normH2);
    for (std::size_t node = 0; node < geo.nodes.size(); ++node)
        if (!(geo.nodes[node].normH2 >= 1e-14 * maxH2) || maxH2 == 0)
            throw MinimalPointError("f_sigma undefined: |H| vanishes at node " + std::to_string(node));

    const double gamma_excess = 2 / sigma;  // p (gamma - 1)
    FsigmaStats st;
    std::vector<double> fp(geo.nodes.size());
    for (std::size_t node = 0; node < geo.nodes.size(); ++node) {
        const auto& nd = geo.nodes[node];
        const double f = std::max(0.0, nd.normh02(geo.n)) / std::pow(nd.normH2, 1 - sigma);
        fp[node] = std::pow(f, p);
        st.max_f = std::max(st.max_f, f);
        st.gamma_ratio = std::max(st.gamma_ratio, std::pow(f, gamma_excess) / nd.normH2);
    }
    st.phi = integrate(geo, im, fp);
    return st;
}

FsigmaStats fsigma_integral(const DiscreteImmersion& im, double sigma, double p)
{
    return fsigma_integral(geometry_field(im), im, sigma, p);
}

DiagnosticsRecord diagnostics(const GeometryField& geo, const DiscreteImmersion& im, const PinchSpec& pinch,
                              FlowMode mode, std::optional<double> T)
{
    const std::size_t count = geo.nodes.size();
    DiagnosticsRecord r;
    r.t = im.t;
    r.area = area(geo, im);

    std::vector<double> field(count);
    double maxH2 = 0;
    double minH2 = std::numeric_limits<double>::infinity();
    double maxRatio = -std::numeric_limits<double>::infinity();
    double maxQ = -std::numeric_limits<double>::infinity();
    for (std::size_t node = 0; node < count; ++node) {
        const auto& nd = geo.nodes[node];
        field[node] = nd.normH2;
        maxH2 = std::max(maxH2, nd.normH2);
        minH2 = std::min(minH2, nd.normH2);
        if (nd.normH2 > 0)
            maxRatio = std::max(maxRatio, nd.normh2 / nd.normH2);
        maxQ = std::max(maxQ, nd.normh2 + pinch.a - pinch.c * nd.normH2);
    }
    r.intH2 = integrate(geo, im, field);
    r.maxH = std::sqrt(maxH2);
    r.minH = std::sqrt(minH2);
    r.maxRatio = std::isfinite(maxRatio) ? maxRatio : std::numeric_limits<double>::quiet_NaN();
    r.maxQ = maxQ;
    r.minQ = -maxQ;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
        const FsigmaStats main = fsigma_integral(geo, im, pinch.sigma, pinch.p);
        r.phi = main.phi;
        r.maxF = main.max_f;
        r.gammaRatio = main.gamma_ratio;
        r.phiAlt = fsigma_integral(geo, im, 0.05, 40).phi;
    }
    catch (const MinimalPointError&) {
        r.phi = r.maxF = r.gammaRatio = r.phiAlt = nan;
    }

    if (im.n == 2) {
        for (std::size_t node = 0; node < count; ++node)
            field[node] = 0.5 * geo.nodes[node].scalar_curv();
        r.gaussBonnet = integrate(geo, im, field);
    }

    if (mode == FlowMode::Ancient)
        r.tIq = -im.t * maxH2;
    else if (T)
        r.tIq = (*T - im.t) * maxH2;
    else
        r.tIq = nan;
    return r;
}

DiagnosticsRecord diagnostics(const DiscreteImmersion& im, const PinchSpec& pinch, FlowMode mode,
                              std::optional<double> T)
{
    return diagnostics(geometry_field(im), im, pinch, mode, T);
}

// ---------------------------------------------------------------- run

std::optional<double> estimate_singular_time(std::span<const DiagnosticsRecord> recs)
{
    if (recs.size() < 2)
        return std::nullopt;
    const auto& a = recs[recs.size() - 2];
    const auto& b = recs[recs.size() - 1];
    const double ya = 1 / (a.maxH * a.maxH);
    const double yb = 1 / (b.maxH * b.maxH);
    if (!(b.t > a.t) || !(ya > yb) || !std::isfinite(ya) || !std::isfinite(yb))
        return std::nullopt;
    return b.t + yb * (b.t - a.t) / (ya - yb);
}

Trajectory run(const DiscreteImmersion& seed, const FlowConfig& config)
{
    config.validate();
    seed.validate();

    std::unique_ptr<PolarFilter> filter;
    if (config.polar_filter && seed.grid.topology == Topology::LatLongSphere)
        filter = std::make_unique<PolarFilter>(seed.grid);

    std::vector<double> marks = config.record_times;
    std::sort(marks.begin(), marks.end());

    Trajectory traj;
    traj.mode = config.mode;
    DiscreteImmersion im = seed;
    GeometryField geo = geometry_field(im, config.exec);

    long steps = 0;
    bool last_recorded = false;
    auto record = [&] {
        traj.diagnostics.push_back(diagnostics(geo, im, config.pinch, config.mode));
        traj.diagnostics.back().step = steps;
        traj.snapshots.push_back(im);
        last_recorded = true;
    };
    record();

    auto next_mark = marks.begin();
    while (true) {
        while (next_mark != marks.end() && *next_mark <= im.t)
            ++next_mark;
        if (!(im.t < config.t_end)) {
            traj.stop = StopReason::EndTime;
            break;
        }
        if (steps >= config.max_steps) {
            traj.stop = StopReason::MaxSteps;
            break;
        }
        if (max_normh2(geo) > config.stop_on_blowup) {
            traj.stop = StopReason::Blowup;
            traj.message = "max |h|^2 exceeded the blowup cap at t = " + format17(im.t);
            break;
        }

        double dt = cfl_dt(geo, config.cfl);
        double target = config.t_end;
        bool forced = false;
        if (next_mark != marks.end() && *next_mark < target) {
            target = *next_mark;
            forced = true;
        }
        bool landed = false;
        if (im.t + dt >= target) {
            dt = target - im.t;
            landed = true;
        }

        try {
            std::vector<double> k1 = geo.H;
            if (filter)
                filter->apply(k1, geo.dim, config.exec);
            DiscreteImmersion next = step(im, dt, config.integrator, filter.get(), config.exec, &k1);
            if (landed)
                next.t = target;
            GeometryField next_geo = geometry_field(next, config.exec);
            im = std::move(next);
            geo = std::move(next_geo);
        }
        catch (const DegenerateGeometryError& e) {
            traj.stop = StopReason::Degenerate;
            traj.message = std::string(e.what()) + " (t = " + format17(im.t) + ")";
            break;
        }
        ++steps;
        last_recorded = false;
        if (steps % config.snapshot_every == 0 || (landed && forced))
            record();
    }
    if (!last_recorded)
        record();

    if (config.mode == FlowMode::Forward) {
        traj.T_singular = estimate_singular_time(traj.diagnostics);
        if (traj.T_singular)
            for (auto& r : traj.diagnostics)
                r.tIq = (*traj.T_singular - r.t) * r.maxH * r.maxH;
    }
    return traj;
}

// ---------------------------------------------------------------- analysis

TypeClass classify_type(std::span<const DiagnosticsRecord> recs, FlowMode mode)
{
    std::vector<std::pair<double, double>> series;
    for (const auto& r : recs)
        if (std::isfinite(r.tIq) && (mode == FlowMode::Forward || r.t < 0))
            series.emplace_back(r.t, r.tIq);
    if (series.size() < 10)
        throw std::invalid_argument("classify_type needs at least 10 records with a finite type-I quantity");
    if (mode == FlowMode::Ancient)
        std::sort(series.begin(), series.end(), [](auto a, auto b) { return a.first > b.first; });
    else
        std::sort(series.begin(), series.end());

    TypeClass tc;
    for (const auto& [t, q] : series)
        tc.C2 = std::max(tc.C2, q);
    const std::size_t half = series.size() / 2;
    const double start = series[half].second;
    double peak = start;
    for (std::size_t i = half; i < series.size(); ++i)
        peak = std::max(peak, series[i].second);
    tc.growth = (peak - start) / std::abs(start);
    tc.type_I = tc.growth <= 0.05;
    tc.C = std::sqrt(tc.C2);
    return tc;
}

TypeClass classify_type(const Trajectory& traj)
{
    return classify_type(traj.diagnostics, traj.mode);
}

namespace {

void rescale_in_place(DiscreteImmersion& im, double scale, std::span<const double> origin)
{
    const int dim = im.ambient_dim();
    for (long node = 0; node < im.nodes(); ++node)
        for (int c = 0; c < dim; ++c) {
            double& x = im.positions[node * dim + c];
            x = scale * (x - origin[c]);
        }
    for (auto& s : im.period_shift)
        for (double& v : s)
            v *= scale;
}

/// Geometry of x -> scale * x + b from the geometry of x. Re-differencing the
/// rounded image instead would amplify position roundoff by 1/(h sin(theta))^2
/// on the rows next to a pole.
GeometryField similarity_image(GeometryField geo, double scale)
{
    const double s2 = scale * scale;
    const double volume = std::pow(scale, geo.n);
    for (auto& nd : geo.nodes) {
        nd.normH2 /= s2;
        nd.normh2 /= s2;
        nd.sqrt_det_g *= volume;
        nd.spacing *= scale;
    }
    for (double& h : geo.H)
        h /= scale;
    return geo;
}

/// Appends `source` transformed by (scale, origin) at time `t` and its diagnostics.
void push_rescaled(Trajectory& out, const DiscreteImmersion& source, double scale, std::span<const double> origin,
                   double t, Exec exec)
{
    const GeometryField geo = similarity_image(geometry_field(source, exec), scale);
    DiscreteImmersion im = source;
    rescale_in_place(im, scale, origin);
    im.t = t;
    DiagnosticsRecord r = diagnostics(geo, im, PinchSpec{}, FlowMode::Forward);
    r.tIq = std::numeric_limits<double>::quiet_NaN();
    out.diagnostics.push_back(r);
    out.snapshots.push_back(std::move(im));
}

}  // namespace

RescaleResult blowup_type2(const Trajectory& traj, TimeWindow window, Exec exec)
{
    if (traj.mode == FlowMode::Forward && !traj.T_singular)
        throw std::invalid_argument("forward blow-up needs an estimated singular time");
    RescaleResult res;
    bool found = false;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        const DiscreteImmersion& im = traj.snapshots[s];
        if (im.t < window.t_min || im.t > window.t_max)
            continue;
        const double w = traj.mode == FlowMode::Ancient ? -im.t : *traj.T_singular - im.t;
        const GeometryField geo = geometry_field(im, exec);
        for (std::size_t node = 0; node < geo.nodes.size(); ++node) {
            const double v = w * geo.nodes[node].normH2;
            if (v > best) {
                best = v;
                found = true;
                res.base_index = s;
                res.base_node = static_cast<long>(node);
                res.L = geo.nodes[node].normH2;
            }
        }
    }
    if (!found)
        throw std::invalid_argument("blow-up window contains no snapshot");
    if (!(res.L > 0))
        throw MinimalPointError("blow-up base point has H = 0");

    const DiscreteImmersion& base = traj.snapshots[res.base_index];
    res.base_time = base.t;
    const auto p = base.point(res.base_node);
    const std::vector<double> origin(p.begin(), p.end());
    const double scale = std::sqrt(res.L);

    res.trajectory.mode = traj.mode;
    res.trajectory.stop = traj.stop;
    for (const auto& im : traj.snapshots)
        push_rescaled(res.trajectory, im, scale, origin, (im.t - res.base_time) * res.L, exec);
    return res;
}

std::vector<double> default_type1_taus(int count)
{
    if (count < 2)
        throw std::invalid_argument("need at least two tau values");
    std::vector<double> taus(count);
    for (int s = 0; s < count; ++s)
        taus[s] = -2.0 + static_cast<double>(s) / (count - 1);
    return taus;
}

RescaleResult rescale_type1(const Trajectory& traj, double t_j, std::span<const double> taus)
{
    if (!(t_j < 0))
        throw std::invalid_argument("type-I rescaling needs t_j < 0");
    if (traj.snapshots.empty())
        throw std::invalid_argument("empty trajectory");
    const auto& snaps = traj.snapshots;
    const double scale = 1 / std::sqrt(-t_j);

    RescaleResult res;
    res.L = 1 / -t_j;
    res.base_time = t_j;
    res.trajectory.mode = traj.mode;
    const std::vector<double> zero(snaps.front().ambient_dim(), 0.0);
    for (double tau : taus) {
        const double t = -t_j * tau;
        const double tol = 1e-12 * std::max(1.0, std::abs(t));
        std::size_t hit = snaps.size();
        for (std::size_t s = 0; s < snaps.size(); ++s)
            if (std::abs(snaps[s].t - t) <= tol) {
                hit = s;
                break;
            }
        DiscreteImmersion im;
        if (hit < snaps.size()) {
            im = snaps[hit];
        }
        else {
            std::size_t s = 0;
            while (s + 1 < snaps.size() && !(snaps[s].t <= t && t <= snaps[s + 1].t))
                ++s;
            if (s + 1 >= snaps.size())
                throw std::invalid_argument("trajectory does not cover t = " + format17(t));
            const double w = (t - snaps[s].t) / (snaps[s + 1].t - snaps[s].t);
            im = snaps[s];
            for (std::size_t c = 0; c < im.positions.size(); ++c)
                im.positions[c] = (1 - w) * snaps[s].positions[c] + w * snaps[s + 1].positions[c];
        }
        push_rescaled(res.trajectory, im, scale, zero, tau, Exec::Parallel);
    }
    return res;
}

AreaFit fit_area_decay(std::span<const DiagnosticsRecord> recs, TimeWindow window, double t_ref)
{
    std::vector<double> xs, ys;
    for (const auto& r : recs) {
        if (r.t < window.t_min || r.t > window.t_max || r.t == t_ref || !(r.area > 0))
            continue;
        xs.push_back(std::log(std::abs(r.t - t_ref)));
        ys.push_back(std::log(r.area));
    }
    if (xs.size() < 2)
        throw std::invalid_argument("area fit needs at least two records in the window");
    const double m = static_cast<double>(xs.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0))
        throw std::invalid_argument("area fit needs distinct times");
    AreaFit fit;
    fit.r = sxy / sxx;
    fit.c = std::exp(my - fit.r * mx);
    fit.points = static_cast<int>(xs.size());
    return fit;
}

double mean_radius(const DiscreteImmersion& im)
{
    double sum = 0;
    for (long node = 0; node < im.nodes(); ++node) {
        double r2 = 0;
        for (double x : im.point(node))
            r2 += x * x;
        sum += std::sqrt(r2);
    }
    return sum / static_cast<double>(im.nodes());
}

// ---------------------------------------------------------------- CSV

namespace {

constexpr const char* kMainHeader = "t,area,intH2,maxH,minH,maxRatio,minQ,phi,gaussBonnet,tIq";

}  // namespace

void write_diagnostics_csv(std::ostream& os, std::span<const DiagnosticsRecord> recs)
{
    os << kMainHeader << '\n';
    for (const auto& r : recs) {
        os << format17(r.t) << ',' << format17(r.area) << ',' << format17(r.intH2) << ',' << format17(r.maxH)
           << ',' << format17(r.minH) << ',' << format17(r.maxRatio) << ',' << format17(r.minQ) << ','
           << format17(r.phi) << ',' << (r.gaussBonnet ? format17(*r.gaussBonnet) : "") << ','
           << format17(r.tIq) << '\n';
    }
}

void write_extra_csv(std::ostream& os, std::span<const DiagnosticsRecord> recs)
{
    os << "t,step,maxQ,maxF,phiAlt,gammaRatio\n";
    for (const auto& r : recs)
        os << format17(r.t) << ',' << r.step << ',' << format17(r.maxQ) << ',' << format17(r.maxF) << ','
           << format17(r.phiAlt) << ',' << format17(r.gammaRatio) << '\n';
}

std::vector<DiagnosticsRecord> read_diagnostics_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != kMainHeader)
        throw DataError("diagnostics table has a missing or unexpected header");
    std::vector<DiagnosticsRecord> out;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (!line.empty() && line.back() == ',')
            cells.emplace_back();
        if (cells.size() != 10)
            throw DataError("diagnostics line " + std::to_string(lineno) + ": expected 10 fields");
        try {
            DiagnosticsRecord r;
            r.t = std::stod(cells[0]);
            r.area = std::stod(cells[1]);
            r.intH2 = std::stod(cells[2]);
            r.maxH = std::stod(cells[3]);
            r.minH = std::stod(cells[4]);
            r.maxRatio = std::stod(cells[5]);
            r.minQ = std::stod(cells[6]);
            r.maxQ = -r.minQ;
            r.phi = std::stod(cells[7]);
            if (!cells[8].empty())
                r.gaussBonnet = std::stod(cells[8]);
            r.tIq = std::stod(cells[9]);
            out.push_back(r);
        }
        catch (const std::exception&) {
            throw DataError("diagnostics line " + std::to_string(lineno) + ": bad number");
        }
    }
    return out;
}

}  // namespace mcf
