#include "mcflow/curvature.hpp"

#include "mcflow/errors.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mcf {

PointCurvature::PointCurvature(int n, int k)
    : n_(n), k_(k), data_(static_cast<std::size_t>(n) * n * k, 0.0)
{
    if (n < 1 || k < 1)
        throw std::invalid_argument("PointCurvature: n and k must be >= 1");
}

PointCurvature::PointCurvature(int n, int k, std::vector<double> data)
    : n_(n), k_(k), data_(std::move(data))
{
    if (n < 1 || k < 1)
        throw std::invalid_argument("PointCurvature: n and k must be >= 1");
    if (data_.size() != static_cast<std::size_t>(n) * n * k)
        throw std::invalid_argument("PointCurvature: data has wrong size");
    for (int a = 0; a < k; ++a)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double v = (*this)(i, j, a);
                if (!std::isfinite(v))
                    throw std::invalid_argument("PointCurvature: non-finite entry");
                if (v != (*this)(j, i, a))
                    throw std::invalid_argument("PointCurvature: slice not symmetric");
            }
}

PointCurvature PointCurvature::from_slices(const std::vector<Eigen::MatrixXd>& slices)
{
    if (slices.empty())
        throw std::invalid_argument("PointCurvature: no slices");
    const int n = static_cast<int>(slices.front().rows());
    const int k = static_cast<int>(slices.size());
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(n) * n * k);
    for (const auto& s : slices) {
        if (s.rows() != n || s.cols() != n)
            throw std::invalid_argument("PointCurvature: slice shape mismatch");
        data.insert(data.end(), s.data(), s.data() + s.size());
    }
    return {n, k, std::move(data)};
}

PointCurvature PointCurvature::scaled(double lambda) const
{
    PointCurvature out = *this;
    for (double& v : out.data_)
        v *= lambda;
    return out;
}

PointCurvature PointCurvature::rotated(const Eigen::MatrixXd& Qt, const Eigen::MatrixXd& Qn) const
{
    if (Qt.rows() != n_ || Qt.cols() != n_ || Qn.rows() != k_ || Qn.cols() != k_)
        throw std::invalid_argument("PointCurvature::rotated: frame size mismatch");
    std::vector<Eigen::MatrixXd> tangential(k_);
    for (int a = 0; a < k_; ++a)
        tangential[a] = Qt.transpose() * slice(a) * Qt;
    std::vector<Eigen::MatrixXd> out(k_, Eigen::MatrixXd::Zero(n_, n_));
    for (int b = 0; b < k_; ++b) {
        for (int a = 0; a < k_; ++a)
            out[b] += Qn(a, b) * tangential[a];
        // symmetric up to roundoff; restore exact symmetry
        out[b] = 0.5 * (out[b] + out[b].transpose()).eval();
    }
    return from_slices(out);
}

std::vector<double> mean_curvature(const PointCurvature& pc)
{
    std::vector<double> H(pc.k(), 0.0);
    for (int a = 0; a < pc.k(); ++a)
        for (int i = 0; i < pc.n(); ++i)
            H[a] += pc(i, i, a);
    return H;
}

CurvatureScalars scalars(const PointCurvature& pc)
{
    const auto H = mean_curvature(pc);
    CurvatureScalars s;
    for (double h : H)
        s.normH2 += h * h;
    for (double v : pc.data())
        s.normh2 += v * v;
    s.normh02 = s.normh2 - s.normH2 / pc.n();
    s.scalar_curv = s.normH2 - s.normh2;
    if (s.normH2 > 0)
        s.ratio = s.normh2 / s.normH2;
    return s;
}

PointCurvature traceless(const PointCurvature& pc)
{
    const auto H = mean_curvature(pc);
    PointCurvature out = pc;
    for (int a = 0; a < pc.k(); ++a)
        for (int i = 0; i < pc.n(); ++i)
            out.set(i, i, a, pc(i, i, a) - H[a] / pc.n());
    return out;
}

NormalCurvature normal_curvature(const PointCurvature& pc, NormalCurvatureSource source)
{
    const PointCurvature src = source == NormalCurvatureSource::Traceless ? traceless(pc) : pc;
    const int n = pc.n();
    const int k = pc.k();
    NormalCurvature out;
    out.n = n;
    out.k = k;
    out.rperp.assign(static_cast<std::size_t>(n) * n * k * k, 0.0);
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            const Eigen::MatrixXd comm = src.slice(a) * src.slice(b) - src.slice(b) * src.slice(a);
            double* dst = out.rperp.data() + (static_cast<std::size_t>(a) * k + b) * n * n;
            Eigen::Map<Eigen::MatrixXd>(dst, n, n) = comm;
            out.norm2 += comm.squaredNorm();
        }
    }
    return out;
}

CurvatureOperator gauss_operator(const PointCurvature& pc, double ambient_K)
{
    const int n = pc.n();
    if (n < 2)
        throw std::invalid_argument("gauss_operator: needs n >= 2");
    std::vector<std::pair<int, int>> basis;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            basis.emplace_back(i, j);
    const int dim = static_cast<int>(basis.size());

    CurvatureOperator op;
    op.mat.setZero(dim, dim);
    for (int r = 0; r < dim; ++r) {
        const auto [i, j] = basis[r];
        for (int c = r; c < dim; ++c) {
            const auto [kk, l] = basis[c];
            double v = 0;
            for (int a = 0; a < pc.k(); ++a)
                v += pc(i, kk, a) * pc(j, l, a) - pc(i, l, a) * pc(j, kk, a);
            if (r == c)
                v += ambient_K;
            op.mat(r, c) = v;
            op.mat(c, r) = v;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.mat, Eigen::EigenvaluesOnly);
    op.min_eigenvalue = es.eigenvalues()(0);
    return op;
}

ReactionTerms reaction_terms(const PointCurvature& pc)
{
    const int k = pc.k();
    ReactionTerms rt;
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            const double dot = pc.slice(a).cwiseProduct(pc.slice(b)).sum();
            rt.r1 += dot * dot;
        }
    rt.r1 += normal_curvature(pc).norm2;

    const auto H = mean_curvature(pc);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(pc.n(), pc.n());
    for (int a = 0; a < k; ++a)
        m += H[a] * pc.slice(a);
    rt.r2 = m.squaredNorm();
    return rt;
}

void PinchSpec::validate() const
{
    if (!(c > 0))
        throw std::invalid_argument("PinchSpec: c must be > 0");
    if (!(a >= 0))
        throw std::invalid_argument("PinchSpec: a must be >= 0");
    if (!(eps >= 0))
        throw std::invalid_argument("PinchSpec: eps must be >= 0");
    if (!(sigma > 0 && sigma < 1))
        throw std::invalid_argument("PinchSpec: sigma must lie in (0, 1)");
    if (!(p >= 1))
        throw std::invalid_argument("PinchSpec: p must be >= 1");
}

double pinch_Q(const CurvatureScalars& s, const PinchSpec& spec)
{
    return s.normh2 + spec.a - spec.c * s.normH2;
}

double pinch_Q(const PointCurvature& pc, const PinchSpec& spec)
{
    return pinch_Q(scalars(pc), spec);
}

IdentitySides lemma_identity(const Eigen::MatrixXd& B, int i1, int i2)
{
    const int n = static_cast<int>(B.rows());
    if (n < 2 || B.cols() != n)
        throw std::invalid_argument("lemma_identity: B must be square with n >= 2");
    if (i1 == i2 || i1 < 0 || i2 < 0 || i1 >= n || i2 >= n)
        throw std::invalid_argument("lemma_identity: need two distinct eigenvalue indices");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& kappa = es.eigenvalues();  // ascending
    const double tr = B.trace();
    const double shift = tr / (n - 1);

    IdentitySides out;
    out.lhs = B.squaredNorm() - tr * tr / (n - 1);
    const double k1 = kappa(i1);
    const double k2 = kappa(i2);
    out.rhs = -2 * k1 * k2 + (k1 + k2 - shift) * (k1 + k2 - shift);
    for (int l = 0; l < n; ++l) {
        if (l == i1 || l == i2)
            continue;
        out.rhs += (kappa(l) - shift) * (kappa(l) - shift);
    }
    return out;
}

Rational cn(int n)
{
    if (n < 2)
        throw std::invalid_argument("cn: n must be >= 2, got " + std::to_string(n));
    Rational r = n <= 3 ? Rational{4, 3 * static_cast<std::int64_t>(n)}
                        : Rational{1, static_cast<std::int64_t>(n) - 1};
    const auto g = std::gcd(r.num, r.den);
    return {r.num / g, r.den / g};
}

AdaptedSplit adapted_split(const PointCurvature& pc)
{
    const int n = pc.n();
    const int k = pc.k();
    const auto H = mean_curvature(pc);
    double normH2 = 0;
    for (double h : H)
        normH2 += h * h;
    if (!(normH2 > 0))
        throw MinimalPointError("adapted_split: |H| = 0");

    AdaptedSplit out;
    out.normH = std::sqrt(normH2);
    const PointCurvature h0 = traceless(pc);

    Eigen::MatrixXd h01 = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < k; ++a)
        h01 += (H[a] / out.normH) * h0.slice(a);
    out.normh01sq = h01.squaredNorm();
    for (int a = 0; a < k; ++a)
        out.normhminsq += (h0.slice(a) - (H[a] / out.normH) * h01).squaredNorm();

    const auto s = scalars(pc);
    const double r2 = reaction_terms(pc).r2;
    const double predicted = out.normh01sq * normH2 + normH2 * normH2 / n;
    out.r2_residual = std::abs(r2 - predicted) / (1 + s.normh2 * s.normh2);
    return out;
}

double reaction_estimate_gap(const PointCurvature& pc)
{
    const AdaptedSplit sp = adapted_split(pc);
    const ReactionTerms rt = reaction_terms(pc);
    const double x = sp.normh01sq;
    const double y = sp.normhminsq;
    const double H2 = sp.normH * sp.normH;
    const double rhs = x * x + x * H2 / pc.n() + 4 * x * y + 1.5 * y * y;
    return rhs - (rt.r1 - rt.r2 / pc.n());
}

}  // namespace mcf
