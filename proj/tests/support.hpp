#pragma once

// Independent reference computations for the unit tests. Everything here is
// written from the defining formulas with plain index loops, sharing no code
// with the library beyond its data types.

#include "mcflow/curvature.hpp"
#include "mcflow/grid.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using mcf::PointCurvature;

inline double H(const PointCurvature& pc, int a)
{
    double s = 0;
    for (int i = 0; i < pc.n(); ++i)
        s += pc(i, i, a);
    return s;
}

inline double normH2(const PointCurvature& pc)
{
    double s = 0;
    for (int a = 0; a < pc.k(); ++a)
        s += H(pc, a) * H(pc, a);
    return s;
}

inline double normh2(const PointCurvature& pc)
{
    double s = 0;
    for (int a = 0; a < pc.k(); ++a)
        for (int i = 0; i < pc.n(); ++i)
            for (int j = 0; j < pc.n(); ++j)
                s += pc(i, j, a) * pc(i, j, a);
    return s;
}

inline double h0(const PointCurvature& pc, int i, int j, int a)
{
    return pc(i, j, a) - (i == j ? H(pc, a) / pc.n() : 0.0);
}

/// R^perp_{ijab} = sum_p h°_ipa h°_jpb - h°_jpa h°_ipb
inline double rperp(const PointCurvature& pc, int i, int j, int a, int b)
{
    double s = 0;
    for (int p = 0; p < pc.n(); ++p)
        s += h0(pc, i, p, a) * h0(pc, j, p, b) - h0(pc, j, p, a) * h0(pc, i, p, b);
    return s;
}

inline double rperp_norm2(const PointCurvature& pc)
{
    double s = 0;
    for (int a = 0; a < pc.k(); ++a)
        for (int b = 0; b < pc.k(); ++b)
            for (int i = 0; i < pc.n(); ++i)
                for (int j = 0; j < pc.n(); ++j)
                    s += rperp(pc, i, j, a, b) * rperp(pc, i, j, a, b);
    return s;
}

/// R1 = sum_ab (sum_ij h_ija h_ijb)^2 + |R^perp|^2
inline double R1(const PointCurvature& pc)
{
    double s = 0;
    for (int a = 0; a < pc.k(); ++a)
        for (int b = 0; b < pc.k(); ++b) {
            double d = 0;
            for (int i = 0; i < pc.n(); ++i)
                for (int j = 0; j < pc.n(); ++j)
                    d += pc(i, j, a) * pc(i, j, b);
            s += d * d;
        }
    return s + rperp_norm2(pc);
}

/// R2 = sum_ij (sum_a H_a h_ija)^2
inline double R2(const PointCurvature& pc)
{
    double s = 0;
    for (int i = 0; i < pc.n(); ++i)
        for (int j = 0; j < pc.n(); ++j) {
            double d = 0;
            for (int a = 0; a < pc.k(); ++a)
                d += H(pc, a) * pc(i, j, a);
            s += d * d;
        }
    return s;
}

/// Gauss-equation curvature operator on pairs (i<j), lexicographic, plus K.
inline Eigen::MatrixXd gauss(const PointCurvature& pc, double K = 0)
{
    const int n = pc.n();
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            pairs.emplace_back(i, j);
    const int m = static_cast<int>(pairs.size());
    Eigen::MatrixXd R(m, m);
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) {
            const auto [i, j] = pairs[p];
            const auto [k, l] = pairs[q];
            double s = 0;
            for (int a = 0; a < pc.k(); ++a)
                s += pc(i, k, a) * pc(j, l, a) - pc(i, l, a) * pc(j, k, a);
            R(p, q) = s + (p == q ? K : 0.0);
        }
    return R;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

/// Oblate or prolate ellipsoid of revolution (a, a, c) on a lat-long grid.
inline mcf::DiscreteImmersion ellipsoid(int n_lat, double a, double c)
{
    mcf::DiscreteImmersion im;
    im.grid = mcf::ParamGrid::lat_long(n_lat, 2 * n_lat);
    im.n = 2;
    im.k = 1;
    for (int i = 0; i < im.grid.res[0]; ++i)
        for (int j = 0; j < im.grid.res[1]; ++j) {
            const double th = im.grid.coord(0, i);
            const double ph = im.grid.coord(1, j);
            im.positions.push_back(a * std::sin(th) * std::cos(ph));
            im.positions.push_back(a * std::sin(th) * std::sin(ph));
            im.positions.push_back(c * std::cos(th));
        }
    return im;
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("mcflow_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string str(const std::string& sub = {}) const { return (sub.empty() ? path_ : path_ / sub).string(); }

private:
    std::filesystem::path path_;
};

}  // namespace oracle
