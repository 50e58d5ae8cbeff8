#include "mcflow/sampling.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace mcf {

Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream)
{
    std::vector<std::uint32_t> words;
    words.reserve(2 * (stream.size() + 1));
    auto push = [&words](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(seed);
    for (auto s : stream)
        push(s);
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

Eigen::MatrixXd random_symmetric(Rng& rng, int n)
{
    std::normal_distribution<double> normal;
    Eigen::MatrixXd m(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            m(i, j) = normal(rng);
    return 0.5 * (m + m.transpose());
}

Eigen::MatrixXd random_orthogonal(Rng& rng, int m)
{
    std::normal_distribution<double> normal;
    Eigen::MatrixXd g(m, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
            g(i, j) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < m; ++j)
        if (r(j, j) < 0)
            q.col(j) = -q.col(j);
    return q;
}

PointCurvature random_curvature(Rng& rng, int n, int k)
{
    std::vector<Eigen::MatrixXd> slices;
    slices.reserve(k);
    for (int a = 0; a < k; ++a)
        slices.push_back(random_symmetric(rng, n));
    return PointCurvature::from_slices(slices);
}

PointCurvature with_traceless_norm(const PointCurvature& pc, double target_h02)
{
    const int n = pc.n();
    const auto H = mean_curvature(pc);
    const PointCurvature h0 = traceless(pc);
    double cur = 0;
    for (double v : h0.data())
        cur += v * v;
    const double s = cur > 0 ? std::sqrt(std::max(target_h02, 0.0) / cur) : 0.0;
    PointCurvature out(n, pc.k());
    for (int a = 0; a < pc.k(); ++a)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i <= j; ++i) {
                const double umb = i == j ? H[a] / n : 0.0;
                out.set(i, j, a, s * h0(i, j, a) + umb);
            }
    return out;
}

double budget_fraction(Rng& rng)
{
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double u = uni(rng);
    return 1.0 - u * u;
}

PointCurvature pinched_sample(Rng& rng, int n, int k, double c)
{
    if (!(c > 1.0 / n))
        throw std::invalid_argument("pinched_sample: need c > 1/n");
    const PointCurvature base = random_curvature(rng, n, k);
    double normH2 = 0;
    for (double h : mean_curvature(base))
        normH2 += h * h;
    return with_traceless_norm(base, budget_fraction(rng) * (c - 1.0 / n) * normH2);
}

PointCurvature adapted_sample(Rng& rng, int n, int k, double normH2, double max_h02)
{
    std::normal_distribution<double> normal;
    std::vector<Eigen::MatrixXd> slices(k, Eigen::MatrixXd::Zero(n, n));

    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i)
        d(i) = normal(rng);
    d.array() -= d.mean();
    slices[0] = d.asDiagonal();
    for (int a = 1; a < k; ++a) {
        Eigen::MatrixXd m = random_symmetric(rng, n);
        m -= (m.trace() / n) * Eigen::MatrixXd::Identity(n, n);
        slices[a] = m;
    }
    double cur = 0;
    for (const auto& s : slices)
        cur += s.squaredNorm();
    const double target = budget_fraction(rng) * std::max(max_h02, 0.0);
    const double scale = cur > 0 ? std::sqrt(target / cur) : 0.0;
    for (auto& s : slices)
        s *= scale;
    slices[0] += (std::sqrt(normH2) / n) * Eigen::MatrixXd::Identity(n, n);

    for (auto& s : slices)
        s = (0.5 * (s + s.transpose())).eval();
    const PointCurvature adapted = PointCurvature::from_slices(slices);
    return adapted.rotated(random_orthogonal(rng, n), random_orthogonal(rng, k));
}

}  // namespace mcf
