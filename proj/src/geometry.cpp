#include "mcflow/geometry.hpp"

#include "mcflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mcf {

namespace {

constexpr double kD1[5] = {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12};
constexpr double kD2[5] = {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12};

double dot(const AmbientVec& a, const AmbientVec& b, int dim) noexcept
{
    double s = 0;
    for (int c = 0; c < dim; ++c)
        s += a[c] * b[c];
    return s;
}

}  // namespace

namespace {

/// Shared stencil arithmetic; `at(i, j)` returns the ambient coordinates of
/// the (possibly ghost) point (i, j).
template <int Fixed, typename At>
NodeDerivatives stencil_fixed(const ParamGrid& grid, int n, int runtime_dim, int i, int j, At&& at)
{
    const int dim = Fixed > 0 ? Fixed : runtime_dim;
    NodeDerivatives d;
    d.n = n;
    d.dim = dim;
    {
        const double h = grid.spacing[0];
        for (int o = 0; o < 5; ++o) {
            if (o == 2) {
                const double* f = at(i, j);
                for (int c = 0; c < dim; ++c)
                    d.d2[0][c] += kD2[o] * f[c];
                continue;
            }
            const double* f = at(i + o - 2, j);
            for (int c = 0; c < dim; ++c) {
                d.d1[0][c] += kD1[o] * f[c];
                d.d2[0][c] += kD2[o] * f[c];
            }
        }
        for (int c = 0; c < dim; ++c) {
            d.d1[0][c] /= h;
            d.d2[0][c] /= h * h;
        }
    }
    if (n == 2) {
        const double h = grid.spacing[1];
        for (int o = 0; o < 5; ++o) {
            const double* f = at(i, j + o - 2);
            for (int c = 0; c < dim; ++c) {
                d.d1[1][c] += kD1[o] * f[c];
                d.d2[2][c] += kD2[o] * f[c];
            }
        }
        for (int c = 0; c < dim; ++c) {
            d.d1[1][c] /= h;
            d.d2[2][c] /= h * h;
        }
        for (int a = 0; a < 5; ++a) {
            if (a == 2)
                continue;
            for (int b = 0; b < 5; ++b) {
                if (b == 2)
                    continue;
                const double w = kD1[a] * kD1[b];
                const double* f = at(i + a - 2, j + b - 2);
                for (int c = 0; c < dim; ++c)
                    d.d2[1][c] += w * f[c];
            }
        }
        const double hh = grid.spacing[0] * grid.spacing[1];
        for (int c = 0; c < dim; ++c)
            d.d2[1][c] /= hh;
    }
    return d;
}

/// Compile-time ambient dimensions let the coordinate loops unroll.
template <typename At>
NodeDerivatives stencil_derivatives(const ParamGrid& grid, int n, int dim, int i, int j, At&& at)
{
    switch (dim) {
    case 2:
        return stencil_fixed<2>(grid, n, dim, i, j, at);
    case 3:
        return stencil_fixed<3>(grid, n, dim, i, j, at);
    case 4:
        return stencil_fixed<4>(grid, n, dim, i, j, at);
    case 5:
        return stencil_fixed<5>(grid, n, dim, i, j, at);
    default:
        return stencil_fixed<0>(grid, n, dim, i, j, at);
    }
}

/// Positions with two ghost layers in every grid direction, filled once.
class PaddedPositions {
public:
    explicit PaddedPositions(const DiscreteImmersion& im)
        : n0_(im.grid.res[0]), n1_(im.grid.res[1]), pad1_(im.n == 2 ? 2 : 0), dim_(im.ambient_dim())
    {
        const int w = n1_ + 2 * pad1_;
        data_.resize(static_cast<std::size_t>(n0_ + 4) * w * dim_);
        for (int i = -2; i < n0_ + 2; ++i)
            for (int j = -pad1_; j < n1_ + pad1_; ++j) {
                const GhostRef g = resolve(im.grid, i, j);
                double* dst = slot(i, j);
                for (int c = 0; c < dim_; ++c)
                    dst[c] = im.ghost_coord(g, c);
            }
    }

    const double* operator()(int i, int j) const noexcept
    {
        return data_.data() + (static_cast<std::size_t>(i + 2) * (n1_ + 2 * pad1_) + (j + pad1_)) * dim_;
    }

private:
    double* slot(int i, int j) noexcept
    {
        return data_.data() + (static_cast<std::size_t>(i + 2) * (n1_ + 2 * pad1_) + (j + pad1_)) * dim_;
    }

    int n0_, n1_, pad1_, dim_;
    std::vector<double> data_;
};

NodeDerivatives padded_derivatives(const DiscreteImmersion& im, const PaddedPositions& pad, long node)
{
    const int n1 = im.grid.res[1];
    return stencil_derivatives(im.grid, im.n, im.ambient_dim(), static_cast<int>(node / n1),
                               static_cast<int>(node % n1), pad);
}

}  // namespace

NodeDerivatives node_derivatives(const DiscreteImmersion& im, long node)
{
    const int n1 = im.grid.res[1];
    AmbientVec buf{};
    auto at = [&im, &buf](int i, int j) -> const double* {
        const GhostRef g = resolve(im.grid, i, j);
        for (int c = 0; c < im.ambient_dim(); ++c)
            buf[c] = im.ghost_coord(g, c);
        return buf.data();
    };
    return stencil_derivatives(im.grid, im.n, im.ambient_dim(), static_cast<int>(node / n1),
                               static_cast<int>(node % n1), at);
}

namespace {

template <int Fixed>
void project_fixed(const NodeShape& s, const NodeDerivatives& d, double* v) noexcept
{
    const int n = s.n;
    const int dim = Fixed > 0 ? Fixed : s.dim;
    double w[2] = {0, 0};
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < dim; ++c)
            w[i] += d.d1[i][c] * v[c];
    for (int i = 0; i < n; ++i) {
        double coef = 0;
        for (int m = 0; m < n; ++m)
            coef += s.ginv[i][m] * w[m];
        for (int c = 0; c < dim; ++c)
            v[c] -= coef * d.d1[i][c];
    }
}

template <int Fixed>
bool shape_fixed(const NodeDerivatives& d, NodeShape& s) noexcept
{
    s.n = d.n;
    s.dim = d.dim;
    const int n = d.n;
    const int dim = Fixed > 0 ? Fixed : d.dim;
    if (n == 1) {
        const double g = dot(d.d1[0], d.d1[0], dim);
        if (!(g > 0))
            return false;
        s.g[0][0] = g;
        s.ginv[0][0] = 1 / g;
        s.sqrt_det_g = std::sqrt(g);
        s.condition = 1;
    }
    else {
        const double g00 = dot(d.d1[0], d.d1[0], dim);
        const double g01 = dot(d.d1[0], d.d1[1], dim);
        const double g11 = dot(d.d1[1], d.d1[1], dim);
        const double det = g00 * g11 - g01 * g01;
        if (!(det > 0))
            return false;
        const double half_tr = 0.5 * (g00 + g11);
        const double disc = std::sqrt(std::max(half_tr * half_tr - det, 0.0));
        const double lmax = half_tr + disc;
        const double lmin = det / lmax;
        s.condition = lmax / lmin;
        if (!(s.condition <= kMaxMetricCondition))
            return false;
        s.g[0][0] = g00;
        s.g[0][1] = s.g[1][0] = g01;
        s.g[1][1] = g11;
        s.ginv[0][0] = g11 / det;
        s.ginv[1][1] = g00 / det;
        s.ginv[0][1] = s.ginv[1][0] = -g01 / det;
        s.sqrt_det_g = std::sqrt(det);
    }

    const int npairs = n == 1 ? 1 : 3;
    for (int p = 0; p < npairs; ++p) {
        s.A[p] = d.d2[p];
        project_fixed<Fixed>(s, d, s.A[p].data());
    }
    s.H.fill(0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double w = s.ginv[i][j];
            const auto& a = s.A[sym_index(i, j)];
            for (int c = 0; c < dim; ++c)
                s.H[c] += w * a[c];
        }
    s.normH2 = dot(s.H, s.H, dim);
    double gram[3][3]{};
    for (int p = 0; p < npairs; ++p)
        for (int q = p; q < npairs; ++q)
            gram[p][q] = gram[q][p] = dot(s.A[p], s.A[q], dim);
    if (n == 1) {
        s.normh2 = s.ginv[0][0] * s.ginv[0][0] * gram[0][0];
        return true;
    }
    double h2 = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    h2 += s.ginv[i][a] * s.ginv[j][b] * gram[i + j][a + b];
    s.normh2 = h2;
    return true;
}

}  // namespace

void NodeShape::project_normal(const NodeDerivatives& d, double* v) const noexcept
{
    switch (dim) {
    case 3:
        return project_fixed<3>(*this, d, v);
    case 4:
        return project_fixed<4>(*this, d, v);
    case 5:
        return project_fixed<5>(*this, d, v);
    default:
        return project_fixed<0>(*this, d, v);
    }
}

bool node_shape(const NodeDerivatives& d, NodeShape& out) noexcept
{
    switch (d.dim) {
    case 2:
        return shape_fixed<2>(d, out);
    case 3:
        return shape_fixed<3>(d, out);
    case 4:
        return shape_fixed<4>(d, out);
    case 5:
        return shape_fixed<5>(d, out);
    default:
        return shape_fixed<0>(d, out);
    }
}

namespace {

void check_ambient(const DiscreteImmersion& im)
{
    if (im.ambient_dim() > kMaxAmbient)
        throw std::invalid_argument("ambient dimension exceeds " + std::to_string(kMaxAmbient));
}

/// A grid step whose image is below 1e-12 of the position magnitude is
/// rounding noise: the tangent is lost even when the metric looks well
/// conditioned (always the case for curves).
bool steps_resolved(const DiscreteImmersion& im, const NodeDerivatives& d, long node) noexcept
{
    double mag = 0;
    for (double x : im.point(node))
        mag = std::max(mag, std::abs(x));
    for (int dir = 0; dir < im.n; ++dir) {
        const double step = std::sqrt(dot(d.d1[dir], d.d1[dir], d.dim)) * im.grid.spacing[dir];
        if (!(step > 1e-12 * mag))
            return false;
    }
    return true;
}

double node_spacing(const DiscreteImmersion& im, const NodeDerivatives& d, long node)
{
    const ParamGrid& grid = im.grid;
    double best = std::numeric_limits<double>::infinity();
    for (int dir = 0; dir < im.n; ++dir) {
        double len = std::sqrt(dot(d.d1[dir], d.d1[dir], d.dim)) * grid.spacing[dir];
        if (grid.topology == Topology::LatLongSphere && dir == 1) {
            const int row = static_cast<int>(node / grid.res[1]);
            len /= std::sin(grid.coord(0, row));
        }
        best = std::min(best, len);
    }
    return best;
}

void field_node(const DiscreteImmersion& im, const PaddedPositions& pad, long node, GeometryField& out,
                unsigned char* bad)
{
    const NodeDerivatives d = padded_derivatives(im, pad, node);
    NodeShape s;
    if (!node_shape(d, s) || !steps_resolved(im, d, node)) {
        bad[node] = 1;
        return;
    }
    NodeInvariants& inv = out.nodes[node];
    inv.normH2 = s.normH2;
    inv.normh2 = s.normh2;
    inv.sqrt_det_g = s.sqrt_det_g;
    inv.spacing = node_spacing(im, d, node);
    std::copy_n(s.H.begin(), out.dim, out.H.begin() + node * out.dim);
}

GeometryField make_field(const DiscreteImmersion& im)
{
    check_ambient(im);
    GeometryField f;
    f.n = im.n;
    f.dim = im.ambient_dim();
    f.nodes.resize(im.nodes());
    f.H.assign(static_cast<std::size_t>(im.nodes()) * f.dim, 0.0);
    return f;
}

void raise_first_bad(const std::vector<unsigned char>& bad)
{
    for (std::size_t node = 0; node < bad.size(); ++node)
        if (bad[node])
            throw DegenerateGeometryError(
                "degenerate parametrization (metric condition > 1e12 or unresolved grid step) at node " + std::to_string(node),
                static_cast<long>(node));
}

}  // namespace

namespace serial {
GeometryField geometry_field(const DiscreteImmersion& im)
{
    GeometryField f = make_field(im);
    std::vector<unsigned char> bad(im.nodes(), 0);
    const PaddedPositions pad(im);
    for (long node = 0; node < im.nodes(); ++node)
        field_node(im, pad, node, f, bad.data());
    raise_first_bad(bad);
    return f;
}
}  // namespace serial

namespace omp {
GeometryField geometry_field(const DiscreteImmersion& im)
{
    GeometryField f = make_field(im);
    std::vector<unsigned char> bad(im.nodes(), 0);
    const long count = im.nodes();
    const PaddedPositions pad(im);
#pragma omp parallel for schedule(static)
    for (long node = 0; node < count; ++node)
        field_node(im, pad, node, f, bad.data());
    raise_first_bad(bad);
    return f;
}
}  // namespace omp

GeometryField geometry_field(const DiscreteImmersion& im, Exec exec)
{
    return exec == Exec::Serial ? serial::geometry_field(im) : omp::geometry_field(im);
}

JacobianMetric jacobian_metric(const DiscreteImmersion& im, long node)
{
    check_ambient(im);
    const NodeDerivatives d = node_derivatives(im, node);
    JacobianMetric jm;
    jm.jac.resize(d.dim, d.n);
    for (int i = 0; i < d.n; ++i)
        for (int c = 0; c < d.dim; ++c)
            jm.jac(c, i) = d.d1[i][c];
    jm.g = jm.jac.transpose() * jm.jac;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jm.g, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (!(lmin > 0) || lmax / lmin > kMaxMetricCondition || !steps_resolved(im, d, node))
        throw DegenerateGeometryError("degenerate parametrization at node " + std::to_string(node), node);
    return jm;
}

Eigen::MatrixXd normal_frame(const Eigen::MatrixXd& jac, const Eigen::MatrixXd* reference)
{
    const int dim = static_cast<int>(jac.rows());
    const int n = static_cast<int>(jac.cols());
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(jac);
    const Eigen::MatrixXd R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    double rmax = 0;
    double rmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        rmax = std::max(rmax, std::abs(R(i, i)));
        rmin = std::min(rmin, std::abs(R(i, i)));
    }
    if (!(rmin > 1e-12 * rmax))
        throw DegenerateGeometryError("rank-deficient Jacobian", -1);

    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
    Eigen::MatrixXd N = Q.rightCols(dim - n);

    if (reference == nullptr) {
        for (int a = 0; a < N.cols(); ++a) {
            Eigen::Index imax = 0;
            for (Eigen::Index c = 1; c < N.rows(); ++c)
                if (std::abs(N(c, a)) > std::abs(N(imax, a)))
                    imax = c;
            if (N(imax, a) < 0)
                N.col(a) = -N.col(a);
        }
        return N;
    }
    if (reference->rows() != N.rows() || reference->cols() != N.cols())
        throw std::invalid_argument("normal_frame: reference frame has wrong shape");
    const Eigen::MatrixXd M = N.transpose() * (*reference);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return N * (svd.matrixU() * svd.matrixV().transpose());
}

PointGeometry second_fundamental_form(const DiscreteImmersion& im, long node,
                                      const Eigen::MatrixXd* reference_normals)
{
    const JacobianMetric jm = jacobian_metric(im, node);
    const NodeDerivatives d = node_derivatives(im, node);
    const int n = im.n;
    const int k = im.k;
    const int dim = im.ambient_dim();

    PointGeometry pg;
    pg.g = jm.g;
    pg.jac = jm.jac;
    pg.normals = normal_frame(jm.jac, reference_normals);
    pg.h_coord.assign(static_cast<std::size_t>(n) * n * k, 0.0);
    for (int a = 0; a < k; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double v = 0;
                const auto& f = d.d2[sym_index(i, j)];
                for (int c = 0; c < dim; ++c)
                    v += f[c] * pg.normals(c, a);
                pg.h_coord[(static_cast<std::size_t>(a) * n + j) * n + i] = v;
            }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pg.g);
    const Eigen::MatrixXd gis = es.operatorInverseSqrt();
    std::vector<Eigen::MatrixXd> slices;
    slices.reserve(k);
    for (int a = 0; a < k; ++a) {
        const Eigen::Map<const Eigen::MatrixXd> hc(pg.h_coord.data() + static_cast<std::size_t>(a) * n * n, n, n);
        Eigen::MatrixXd s = gis * hc * gis;
        slices.push_back(0.5 * (s + s.transpose()));
    }
    pg.pc = PointCurvature::from_slices(slices);
    return pg;
}

std::vector<PointGeometry> second_fundamental_forms(const DiscreteImmersion& im)
{
    const int n0 = im.grid.res[0];
    const int n1 = im.grid.res[1];
    std::vector<PointGeometry> out(im.nodes());
    const Eigen::MatrixXd* prev = nullptr;
    for (int i = 0; i < n0; ++i) {
        for (int jj = 0; jj < n1; ++jj) {
            const int j = (i % 2 == 0) ? jj : n1 - 1 - jj;
            const long node = static_cast<long>(i) * n1 + j;
            out[node] = second_fundamental_form(im, node, prev);
            prev = &out[node].normals;
        }
    }
    return out;
}

namespace {

/// Parity of A_ij under reflection through a pole: d/dtheta flips sign.
double reflection_sign(int packed)
{
    return packed == 1 ? -1.0 : 1.0;
}

template <typename ShapeOf>
GradientNorms gradient_core(const DiscreteImmersion& im, long node, const NodeDerivatives& d,
                            const NodeShape& s, ShapeOf&& shape_of)
{
    const ParamGrid& grid = im.grid;
    const int n = im.n;
    const int dim = im.ambient_dim();
    const int npairs = n == 1 ? 1 : 3;
    const int n1 = grid.res[1];
    const int i0 = static_cast<int>(node / n1);
    const int j0 = static_cast<int>(node % n1);

    std::array<std::array<AmbientVec, 3>, 2> dA{};
    std::array<AmbientVec, 2> dH{};
    for (int k = 0; k < n; ++k) {
        for (int o = 0; o < 5; ++o) {
            if (o == 2)
                continue;
            const GhostRef g = k == 0 ? resolve(grid, i0 + o - 2, j0) : resolve(grid, i0, j0 + o - 2);
            const NodeShape& nb = shape_of(g.node);
            const double w = kD1[o] / grid.spacing[k];
            for (int p = 0; p < npairs; ++p) {
                const double sg = g.reflected ? reflection_sign(p) : 1.0;
                for (int c = 0; c < dim; ++c)
                    dA[k][p][c] += w * sg * nb.A[p][c];
            }
            for (int c = 0; c < dim; ++c)
                dH[k][c] += w * nb.H[c];
        }
        for (int p = 0; p < npairs; ++p)
            s.project_normal(d, dA[k][p].data());
        s.project_normal(d, dH[k].data());
    }

    // Christoffel symbols Γ^l_ij = g^{lm} <d_i d_j F, d_m F>
    double gamma[2][2][2]{};
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double v = 0;
                for (int m = 0; m < n; ++m)
                    v += s.ginv[l][m] * dot(d.d2[sym_index(i, j)], d.d1[m], dim);
                gamma[l][i][j] = v;
            }

    // D[k][i][j] = ∇_k h_ij as an ambient normal vector
    std::array<std::array<std::array<AmbientVec, 2>, 2>, 2> D{};
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                AmbientVec& v = D[k][i][j];
                v = dA[k][sym_index(i, j)];
                for (int l = 0; l < n; ++l) {
                    const auto& alj = s.A[sym_index(l, j)];
                    const auto& ail = s.A[sym_index(i, l)];
                    for (int c = 0; c < dim; ++c)
                        v[c] -= gamma[l][k][i] * alj[c] + gamma[l][k][j] * ail[c];
                }
            }

    GradientNorms out;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        for (int c = 0; c < n; ++c)
                            out.grad_h2 += s.ginv[k][a] * s.ginv[i][b] * s.ginv[j][c] *
                                           dot(D[k][i][j], D[a][b][c], dim);
    for (int k = 0; k < n; ++k)
        for (int a = 0; a < n; ++a)
            out.grad_H2 += s.ginv[k][a] * dot(dH[k], dH[a], dim);
    return out;
}

NodeShape checked_shape(const DiscreteImmersion& im, long node)
{
    NodeShape s;
    const NodeDerivatives d = node_derivatives(im, node);
    if (!node_shape(d, s) || !steps_resolved(im, d, node))
        throw DegenerateGeometryError("degenerate parametrization at node " + std::to_string(node), node);
    return s;
}

}  // namespace

GradientNorms covariant_gradients(const DiscreteImmersion& im, long node)
{
    check_ambient(im);
    const NodeDerivatives d = node_derivatives(im, node);
    const NodeShape s = checked_shape(im, node);
    std::vector<std::pair<long, NodeShape>> cache;
    auto shape_of = [&](long nb) -> const NodeShape& {
        for (const auto& [id, sh] : cache)
            if (id == nb)
                return sh;
        cache.emplace_back(nb, checked_shape(im, nb));
        return cache.back().second;
    };
    cache.reserve(8);
    return gradient_core(im, node, d, s, shape_of);
}

std::vector<GradientNorms> covariant_gradient_field(const DiscreteImmersion& im, Exec exec)
{
    check_ambient(im);
    const long count = im.nodes();
    std::vector<NodeShape> shapes(count);
    std::vector<unsigned char> bad(count, 0);
    const PaddedPositions pad(im);
    auto fill = [&](long node) {
        const NodeDerivatives d = padded_derivatives(im, pad, node);
        if (!node_shape(d, shapes[node]) || !steps_resolved(im, d, node))
            bad[node] = 1;
    };
    std::vector<GradientNorms> out(count);
    auto grad = [&](long node) {
        out[node] = gradient_core(im, node, padded_derivatives(im, pad, node), shapes[node],
                                  [&](long nb) -> const NodeShape& { return shapes[nb]; });
    };
    if (exec == Exec::Serial) {
        for (long node = 0; node < count; ++node)
            fill(node);
        raise_first_bad(bad);
        for (long node = 0; node < count; ++node)
            grad(node);
    }
    else {
#pragma omp parallel for schedule(static)
        for (long node = 0; node < count; ++node)
            fill(node);
        raise_first_bad(bad);
#pragma omp parallel for schedule(static)
        for (long node = 0; node < count; ++node)
            grad(node);
    }
    return out;
}

double integrate(const GeometryField& geo, const DiscreteImmersion& im, std::span<const double> field)
{
    if (field.size() != geo.nodes.size())
        throw std::invalid_argument("integrate: field size does not match grid");
    double sum = 0;
    for (std::size_t node = 0; node < field.size(); ++node)
        sum += field[node] * geo.nodes[node].sqrt_det_g;
    return sum * im.grid.cell_volume();
}

double integrate(const DiscreteImmersion& im, std::span<const double> field)
{
    return integrate(geometry_field(im), im, field);
}

double area(const GeometryField& geo, const DiscreteImmersion& im)
{
    double sum = 0;
    for (const auto& nd : geo.nodes)
        sum += nd.sqrt_det_g;
    return sum * im.grid.cell_volume();
}

double gauss_curvature(const DiscreteImmersion& im, long node)
{
    if (im.n != 2)
        throw std::invalid_argument("gauss_curvature: needs a surface (n = 2)");
    const PointGeometry pg = second_fundamental_form(im, node);
    return gauss_operator(pg.pc).mat(0, 0);
}

}  // namespace mcf
