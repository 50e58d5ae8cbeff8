#pragma once

// Seeded random tensors for the property suites.

#include "mcflow/curvature.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mcf {

using Rng = std::mt19937_64;

/// Generator for one independent stream: (seed, stream ids...) go through
/// std::seed_seq, so distinct shards never share state.
Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream);

Eigen::MatrixXd random_symmetric(Rng& rng, int n);

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with sign fix).
Eigen::MatrixXd random_orthogonal(Rng& rng, int m);

/// i.i.d. standard normal entries symmetrized in (i, j).
PointCurvature random_curvature(Rng& rng, int n, int k);

/// Keeps the umbilic part (H/n)g and rescales h° so that |h°|^2 = target.
/// A vanishing h° stays zero.
PointCurvature with_traceless_norm(const PointCurvature& pc, double target_h02);

/// Fraction of the admissible traceless budget used by a pinched sample.
/// Drawn as 1 - U^2 so samples crowd the boundary of the pinching cone.
double budget_fraction(Rng& rng);

/// Random h with |h°|^2 <= (c - 1/n)|H|^2, i.e. |h|^2 <= c|H|^2.
/// Requires c > 1/n.
PointCurvature pinched_sample(Rng& rng, int n, int k, double c);

/// Sample built in the adapted frame: nu_1 = H/|H| with |H|^2 = normH2, a
/// diagonal traceless h°_1, random traceless h°_a (a > 1), rescaled so that
/// |h°|^2 = budget_fraction * max_h02; then randomly rotated in both frames.
PointCurvature adapted_sample(Rng& rng, int n, int k, double normH2, double max_h02);

}  // namespace mcf
