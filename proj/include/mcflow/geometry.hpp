#pragma once

// Finite-difference extrinsic geometry of discrete immersions.
//
// All derivatives use fourth-order central stencils on the structured grid.
// The vector-valued second fundamental form is formed frame-free as the
// normal projection A_ij = (d_i d_j F)^perp, so every invariant and the mean
// curvature vector H = g^ij A_ij need no normal frame at all. Explicit normal
// frames are only built when a PointCurvature is requested.

#include "mcflow/curvature.hpp"
#include "mcflow/exec.hpp"
#include "mcflow/grid.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <vector>

namespace mcf {

inline constexpr int kMaxAmbient = 16;
inline constexpr double kMaxMetricCondition = 1e12;

using AmbientVec = std::array<double, kMaxAmbient>;

/// Packed index of the symmetric pair (i, j) for n <= 2: 00 -> 0, 01 -> 1, 11 -> 2.
constexpr int sym_index(int i, int j) noexcept { return i + j; }

struct NodeDerivatives {
    int n = 1;
    int dim = 2;
    std::array<AmbientVec, 2> d1{};  ///< d_i F
    std::array<AmbientVec, 3> d2{};  ///< d_i d_j F, packed by sym_index
};

NodeDerivatives node_derivatives(const DiscreteImmersion& im, long node);

/// Frame-free shape data at one node.
struct NodeShape {
    int n = 1;
    int dim = 2;
    double g[2][2]{};
    double ginv[2][2]{};
    double sqrt_det_g = 0;
    double condition = 1;
    std::array<AmbientVec, 3> A{};  ///< normal parts of d_i d_j F
    AmbientVec H{};                 ///< mean curvature vector
    double normH2 = 0;
    double normh2 = 0;

    /// v - J g^{-1} J^T v
    void project_normal(const NodeDerivatives& d, double* v) const noexcept;
};

/// False when the metric is singular or its condition number exceeds 1e12.
bool node_shape(const NodeDerivatives& d, NodeShape& out) noexcept;

/// Per-node invariants needed by diagnostics and the time step bound.
struct NodeInvariants {
    double normH2 = 0;
    double normh2 = 0;
    double sqrt_det_g = 0;
    /// Smallest ambient step length along grid lines. Longitude steps on a
    /// lat-long grid are divided by sin(theta): the polar filter restores
    /// equatorial resolution there.
    double spacing = 0;

    double normh02(int n) const noexcept { return normh2 - normH2 / n; }
    double scalar_curv() const noexcept { return normH2 - normh2; }
};

struct GeometryField {
    int n = 1;
    int dim = 2;
    std::vector<NodeInvariants> nodes;
    std::vector<double> H;  ///< mean curvature vectors, node-major
};

namespace serial {
GeometryField geometry_field(const DiscreteImmersion& im);
}
namespace omp {
GeometryField geometry_field(const DiscreteImmersion& im);
}

/// Throws DegenerateGeometryError naming the first bad node (lowest index).
/// A node is bad when cond(g) > 1e12 or when some grid step maps to less
/// than 1e-12 of the node's largest coordinate magnitude.
GeometryField geometry_field(const DiscreteImmersion& im, Exec exec = Exec::Parallel);

struct JacobianMetric {
    Eigen::MatrixXd jac;  ///< (n+k) x n
    Eigen::MatrixXd g;    ///< n x n
};

/// Throws DegenerateGeometryError under the same rule as geometry_field.
JacobianMetric jacobian_metric(const DiscreteImmersion& im, long node);

/// Orthonormal basis of the orthogonal complement of the Jacobian columns.
///
/// Without a reference, each normal is signed so that its largest-magnitude
/// entry (lowest index on ties) is positive. With a reference frame, the
/// result is rotated by the orthogonal Procrustes solution closest to it.
/// Throws DegenerateGeometryError for a rank-deficient Jacobian.
Eigen::MatrixXd normal_frame(const Eigen::MatrixXd& jac, const Eigen::MatrixXd* reference = nullptr);

struct PointGeometry {
    Eigen::MatrixXd g;
    Eigen::MatrixXd jac;
    Eigen::MatrixXd normals;     ///< (n+k) x k
    std::vector<double> h_coord; ///< <d_i d_j F, nu_a>, index (a * n + j) * n + i
    PointCurvature pc;           ///< g^{-1/2} h_coord g^{-1/2}, slice by slice

    double h_coord_at(int i, int j, int a) const
    {
        const int n = static_cast<int>(g.rows());
        return h_coord[(static_cast<std::size_t>(a) * n + j) * n + i];
    }
};

PointGeometry second_fundamental_form(const DiscreteImmersion& im, long node,
                                      const Eigen::MatrixXd* reference_normals = nullptr);

/// All nodes, with normal frames aligned along a serpentine sweep (rows in
/// order, alternating direction) so neighbouring frames vary smoothly.
std::vector<PointGeometry> second_fundamental_forms(const DiscreteImmersion& im);

struct GradientNorms {
    double grad_h2 = 0;  ///< |∇h|^2
    double grad_H2 = 0;  ///< |∇H|^2
};

/// Covariant gradients with the normal connection, built from the normal
/// projection of derivatives of A_ij and H (2-ring stencil).
GradientNorms covariant_gradients(const DiscreteImmersion& im, long node);
std::vector<GradientNorms> covariant_gradient_field(const DiscreteImmersion& im,
                                                    Exec exec = Exec::Parallel);

/// Σ field · sqrt(det g) · cell volume, summed in node order.
double integrate(const GeometryField& geo, const DiscreteImmersion& im, std::span<const double> field);
double integrate(const DiscreteImmersion& im, std::span<const double> field);
double area(const GeometryField& geo, const DiscreteImmersion& im);

/// Sectional curvature of a surface (n = 2) from the Gauss equation.
double gauss_curvature(const DiscreteImmersion& im, long node);

}  // namespace mcf
