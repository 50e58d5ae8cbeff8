#include "mcflow/grid.hpp"

#include "mcflow/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mcf {

std::string_view topology_name(Topology t)
{
    switch (t) {
    case Topology::Circle:
        return "Circle";
    case Topology::Torus2:
        return "Torus2";
    case Topology::LatLongSphere:
        return "LatLongSphere";
    }
    return "?";
}

Topology parse_topology(std::string_view name)
{
    if (name == "Circle")
        return Topology::Circle;
    if (name == "Torus2")
        return Topology::Torus2;
    if (name == "LatLongSphere")
        return Topology::LatLongSphere;
    throw std::invalid_argument("unknown topology '" + std::string(name) + "'");
}

ParamGrid ParamGrid::circle(int n0)
{
    ParamGrid g{Topology::Circle, {n0, 1}, {2 * std::numbers::pi / n0, 0.0}};
    g.validate();
    return g;
}

ParamGrid ParamGrid::torus(int n0, int n1)
{
    ParamGrid g{Topology::Torus2, {n0, n1}, {2 * std::numbers::pi / n0, 2 * std::numbers::pi / n1}};
    g.validate();
    return g;
}

ParamGrid ParamGrid::lat_long(int n_lat, int n_lon)
{
    ParamGrid g{Topology::LatLongSphere, {n_lat, n_lon},
                {std::numbers::pi / n_lat, 2 * std::numbers::pi / n_lon}};
    g.validate();
    return g;
}

double ParamGrid::coord(int dir, int idx) const noexcept
{
    if (topology == Topology::LatLongSphere && dir == 0)
        return (idx + 0.5) * spacing[0];
    return idx * spacing[dir];
}

double ParamGrid::cell_volume() const noexcept
{
    return intrinsic_dim() == 1 ? spacing[0] : spacing[0] * spacing[1];
}

void ParamGrid::validate() const
{
    if (res[0] < 8)
        throw std::invalid_argument("grid resolution must be >= 8 in every direction");
    if (topology == Topology::Circle) {
        if (res[1] != 1)
            throw std::invalid_argument("circle grid has a single direction");
    }
    else if (res[1] < 8) {
        throw std::invalid_argument("grid resolution must be >= 8 in every direction");
    }
    if (topology == Topology::LatLongSphere && res[1] % 2 != 0)
        throw std::invalid_argument("lat-long grid needs an even longitude count");
    for (int d = 0; d < intrinsic_dim(); ++d) {
        const double span = (topology == Topology::LatLongSphere && d == 0) ? std::numbers::pi : 2 * std::numbers::pi;
        if (!(std::abs(spacing[d] * res[d] - span) <= 1e-12 * span))
            throw std::invalid_argument("grid spacing does not match the resolution and topology");
    }
}

namespace {

int floor_div(int a, int b)
{
    int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

}  // namespace

GhostRef resolve(const ParamGrid& grid, int i, int j) noexcept
{
    GhostRef g;
    const int n0 = grid.res[0];
    const int n1 = grid.res[1];
    switch (grid.topology) {
    case Topology::Circle: {
        const int w = floor_div(i, n0);
        g.wraps[0] = w;
        g.node = i - w * n0;
        break;
    }
    case Topology::Torus2: {
        const int w0 = floor_div(i, n0);
        const int w1 = floor_div(j, n1);
        g.wraps = {w0, w1};
        g.node = static_cast<long>(i - w0 * n0) * n1 + (j - w1 * n1);
        break;
    }
    case Topology::LatLongSphere: {
        if (i < 0) {
            i = -1 - i;
            j += n1 / 2;
            g.reflected = true;
        }
        else if (i >= n0) {
            i = 2 * n0 - 1 - i;
            j += n1 / 2;
            g.reflected = true;
        }
        j -= floor_div(j, n1) * n1;
        g.node = static_cast<long>(i) * n1 + j;
        break;
    }
    }
    return g;
}

double DiscreteImmersion::ghost_coord(const GhostRef& g, int c) const noexcept
{
    double v = positions[g.node * ambient_dim() + c];
    for (int d = 0; d < 2; ++d)
        if (g.wraps[d] != 0 && !period_shift[d].empty())
            v += g.wraps[d] * period_shift[d][c];
    return v;
}

void DiscreteImmersion::validate() const
{
    grid.validate();
    if (n != grid.intrinsic_dim())
        throw std::invalid_argument("immersion dimension does not match grid");
    if (k < 1)
        throw std::invalid_argument("codimension must be >= 1");
    if (positions.size() != static_cast<std::size_t>(nodes()) * ambient_dim())
        throw std::invalid_argument("position array does not match grid");
    for (double v : positions)
        if (!std::isfinite(v))
            throw std::invalid_argument("non-finite position");
    for (const auto& s : period_shift)
        if (!s.empty() && s.size() != static_cast<std::size_t>(ambient_dim()))
            throw std::invalid_argument("period shift has wrong dimension");
}

std::string format17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_snapshot(std::ostream& os, const DiscreteImmersion& im)
{
    os << "MCFLOW v1 n=" << im.n << " k=" << im.k << " topology=" << topology_name(im.grid.topology)
       << " res=" << im.grid.res[0] << 'x' << im.grid.res[1] << " t=" << format17(im.t);
    for (int d = 0; d < 2; ++d) {
        const auto& s = im.period_shift[d];
        bool nonzero = false;
        for (double v : s)
            nonzero = nonzero || v != 0.0;
        if (!nonzero)
            continue;
        os << " shift" << d << '=';
        for (std::size_t c = 0; c < s.size(); ++c)
            os << (c ? "," : "") << format17(s[c]);
    }
    os << '\n';
    const int dim = im.ambient_dim();
    for (long node = 0; node < im.nodes(); ++node) {
        for (int c = 0; c < dim; ++c)
            os << (c ? " " : "") << format17(im.positions[node * dim + c]);
        os << '\n';
    }
}

namespace {

ParamGrid grid_for(Topology topo, int r0, int r1)
{
    switch (topo) {
    case Topology::Circle:
        if (r1 != 1)
            throw DataError("circle snapshot must have res <N>x1");
        return ParamGrid::circle(r0);
    case Topology::Torus2:
        return ParamGrid::torus(r0, r1);
    case Topology::LatLongSphere:
        return ParamGrid::lat_long(r0, r1);
    }
    throw DataError("bad topology");
}

std::vector<double> parse_csv_doubles(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(std::stod(item));
    return out;
}

}  // namespace

DiscreteImmersion read_snapshot(std::istream& is)
{
    std::string header;
    if (!std::getline(is, header))
        throw DataError("empty snapshot");
    std::istringstream hs(header);
    std::string magic, version;
    hs >> magic >> version;
    if (magic != "MCFLOW" || version != "v1")
        throw DataError("not an MCFLOW v1 snapshot");

    DiscreteImmersion im;
    bool have_n = false, have_k = false, have_topo = false, have_res = false, have_t = false;
    Topology topo = Topology::Circle;
    int r0 = 0, r1 = 0;
    std::string tok;
    try {
        while (hs >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos)
                throw DataError("malformed header token '" + tok + "'");
            const std::string key = tok.substr(0, eq);
            const std::string val = tok.substr(eq + 1);
            if (key == "n") {
                im.n = std::stoi(val);
                have_n = true;
            }
            else if (key == "k") {
                im.k = std::stoi(val);
                have_k = true;
            }
            else if (key == "topology") {
                topo = parse_topology(val);
                have_topo = true;
            }
            else if (key == "res") {
                const auto x = val.find('x');
                if (x == std::string::npos)
                    throw DataError("malformed res");
                r0 = std::stoi(val.substr(0, x));
                r1 = std::stoi(val.substr(x + 1));
                have_res = true;
            }
            else if (key == "t") {
                im.t = std::stod(val);
                have_t = true;
            }
            else if (key == "shift0") {
                im.period_shift[0] = parse_csv_doubles(val);
            }
            else if (key == "shift1") {
                im.period_shift[1] = parse_csv_doubles(val);
            }
            else {
                throw DataError("unknown header key '" + key + "'");
            }
        }
        if (!(have_n && have_k && have_topo && have_res && have_t))
            throw DataError("incomplete snapshot header");
        im.grid = grid_for(topo, r0, r1);
    }
    catch (const DataError&) {
        throw;
    }
    catch (const std::exception& e) {
        throw DataError(std::string("bad snapshot header: ") + e.what());
    }

    const std::size_t count = static_cast<std::size_t>(im.nodes()) * im.ambient_dim();
    im.positions.resize(count);
    for (std::size_t c = 0; c < count; ++c)
        if (!(is >> im.positions[c]))
            throw DataError("snapshot truncated");
    try {
        im.validate();
    }
    catch (const std::invalid_argument& e) {
        throw DataError(std::string("invalid snapshot: ") + e.what());
    }
    return im;
}

void write_snapshot_file(const std::string& path, const DiscreteImmersion& im)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write " + path);
    write_snapshot(os, im);
}

DiscreteImmersion read_snapshot_file(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw DataError("cannot open " + path);
    return read_snapshot(is);
}

}  // namespace mcf
