#pragma once

// Pointwise curvature algebra for submanifolds M^n of a space form, expressed
// in orthonormal tangent frames {e_i} and normal frames {nu_a}.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mcf {

/// Second fundamental form h_{ija} at one point, symmetric in (i, j).
///
/// Storage is slice-major: slice a is a contiguous column-major n x n block,
/// so `slice(a)` maps directly onto an Eigen matrix.
class PointCurvature {
public:
    PointCurvature() = default;
    PointCurvature(int n, int k);
    /// Throws std::invalid_argument unless every slice is exactly symmetric and finite.
    PointCurvature(int n, int k, std::vector<double> data);

    static PointCurvature from_slices(const std::vector<Eigen::MatrixXd>& slices);

    int n() const noexcept { return n_; }
    int k() const noexcept { return k_; }

    double operator()(int i, int j, int a) const noexcept { return data_[index(i, j, a)]; }
    /// Writes both (i, j) and (j, i).
    void set(int i, int j, int a, double v) noexcept
    {
        data_[index(i, j, a)] = v;
        data_[index(j, i, a)] = v;
    }

    Eigen::Map<const Eigen::MatrixXd> slice(int a) const
    {
        return {data_.data() + static_cast<std::size_t>(a) * n_ * n_, n_, n_};
    }
    std::span<const double> data() const noexcept { return data_; }

    PointCurvature scaled(double lambda) const;

    /// h -> (Qt^T h Qt) mixed with Qn in the normal index: a rotation of the
    /// tangent frame by Qt (n x n) and of the normal frame by Qn (k x k).
    PointCurvature rotated(const Eigen::MatrixXd& Qt, const Eigen::MatrixXd& Qn) const;

private:
    std::size_t index(int i, int j, int a) const noexcept
    {
        return (static_cast<std::size_t>(a) * n_ + j) * n_ + i;
    }

    int n_ = 0;
    int k_ = 0;
    std::vector<double> data_;
};

struct CurvatureScalars {
    double normH2 = 0;       ///< |H|^2
    double normh2 = 0;       ///< |h|^2
    double normh02 = 0;      ///< |h°|^2
    double scalar_curv = 0;  ///< Sc = |H|^2 - |h|^2
    std::optional<double> ratio;  ///< |h|^2 / |H|^2, empty at minimal points
};

/// H_a = sum_i h_{iia}.
std::vector<double> mean_curvature(const PointCurvature& pc);

CurvatureScalars scalars(const PointCurvature& pc);

/// h° = h - (H/n) g, slice by slice.
PointCurvature traceless(const PointCurvature& pc);

/// R^perp_{ij ab}, antisymmetric in (i, j) and in (a, b).
struct NormalCurvature {
    int n = 0;
    int k = 0;
    std::vector<double> rperp;  ///< index ((a * k + b) * n + j) * n + i
    double norm2 = 0;

    double operator()(int i, int j, int a, int b) const
    {
        return rperp[((static_cast<std::size_t>(a) * k + b) * n + j) * n + i];
    }
};

enum class NormalCurvatureSource { Traceless, Full };

/// R^perp = [h°_a, h°_b] in matrix form. Passing Full evaluates the same
/// tensor from h itself; the umbilic part commutes with everything.
NormalCurvature normal_curvature(const PointCurvature& pc,
                                 NormalCurvatureSource source = NormalCurvatureSource::Traceless);

/// Curvature operator on Λ² in the basis {e_i ∧ e_j : i < j}, lexicographic.
struct CurvatureOperator {
    Eigen::MatrixXd mat;
    double min_eigenvalue = 0;
};

/// Gauss equation R_{ijkl} = h_ik·h_jl - h_il·h_jk plus K(δ_ik δ_jl - δ_il δ_jk)
/// for a space-form ambient of sectional curvature K. Requires n >= 2.
CurvatureOperator gauss_operator(const PointCurvature& pc, double ambient_K = 0.0);

struct ReactionTerms {
    double r1 = 0;  ///< sum_ab (h_a · h_b)^2 + |R^perp|^2
    double r2 = 0;  ///< sum_ij (sum_a H_a h_ija)^2
};

ReactionTerms reaction_terms(const PointCurvature& pc);

/// Parameters of Q = |h|^2 + a - c|H|^2 and of f_sigma = |h°|^2 / |H|^{2(1-sigma)}.
struct PinchSpec {
    double c = 2.0 / 3.0;
    double a = 0.0;
    double eps = 0.0;
    double sigma = 0.1;
    double p = 10.0;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

double pinch_Q(const PointCurvature& pc, const PinchSpec& spec);
double pinch_Q(const CurvatureScalars& s, const PinchSpec& spec);

struct IdentitySides {
    double lhs = 0;
    double rhs = 0;
};

/// Both sides of |B|^2 - (tr B)^2/(n-1) = -2κ1κ2 + (κ1+κ2 - tr B/(n-1))^2
///   + Σ_{l≠i1,i2} (κ_l - tr B/(n-1))^2
/// with eigenvalues sorted ascending and (i1, i2) indexing that order.
IdentitySides lemma_identity(const Eigen::MatrixXd& B, int i1, int i2);

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Rational&, const Rational&) = default;
};

/// Sharp pinching constant: 4/(3n) for n = 2, 3 and 1/(n-1) for n >= 4.
Rational cn(int n);

/// Quantities in a normal frame with nu_1 = H/|H|.
struct AdaptedSplit {
    double normH = 0;       ///< |H|
    double normh01sq = 0;   ///< |h°_1|^2
    double normhminsq = 0;  ///< |h°_-|^2
    double r2_residual = 0; ///< |R2 - (|h°_1|^2 |H|^2 + |H|^4/n)| / (1 + |h|^4)
};

/// Throws MinimalPointError when |H| = 0.
AdaptedSplit adapted_split(const PointCurvature& pc);

/// |h°_1|^4 + |h°_1|^2|H|^2/n + 4|h°_1|^2|h°_-|^2 + (3/2)|h°_-|^4 - (R1 - R2/n).
/// Nonnegative up to roundoff. Throws MinimalPointError when |H| = 0.
double reaction_estimate_gap(const PointCurvature& pc);

}  // namespace mcf
