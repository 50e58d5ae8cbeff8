#pragma once

// Pointwise functionals for submanifolds of the round sphere S^{n+k}_R.

#include "mcflow/curvature.hpp"

#include <optional>

namespace mcf {

struct SphereAmbient {
    double R_amb = 1;

    double K() const noexcept { return 1 / (R_amb * R_amb); }
    /// Throws std::invalid_argument unless R_amb > 0.
    void validate() const;
};

/// b = (1 - eps) K n (n - 1). Throws std::invalid_argument unless 0 <= eps <= 1.
double offset_b(int n, const SphereAmbient& amb, double eps);

struct SphereAux {
    double eps = 0;
    double delta = 0;
    double theta = 0;
    double b = 0;
    double f = 0;  ///< |h°|^2 / (|H|^2 + b)
    std::optional<double> termI;
    std::optional<double> termII;
};

/// f = |h°|^2 / (|H|^2 + b) with the offset for the given eps. Throws
/// MinimalPointError when |H|^2 + b = 0.
SphereAux aux_f(const PointCurvature& pc, const SphereAmbient& amb, double eps);
double aux_f_value(const PointCurvature& pc, double b);

/// |h|^2 - |H|^2/(n-1) <= (2 - delta) K.
bool sphere_pinched(const PointCurvature& pc, const SphereAmbient& amb, double delta);

/// Reaction group of the evolution of f:
///   (2/(|H|^2+b)) (R1 - R2/n - nK|h°|^2 - R2|h°|^2/(|H|^2+b) - nK|h°|^2|H|^2/(|H|^2+b)).
/// Throws MinimalPointError when |H|^2 + b = 0.
double term_II(const PointCurvature& pc, const SphereAmbient& amb, double b);

/// Same group with R2 replaced by its adapted-frame form |h°_1|^2|H|^2 + |H|^4/n.
/// Needs |H| > 0.
double term_II_adapted(const PointCurvature& pc, const SphereAmbient& amb, double b);

/// Gradient group -(2/(|H|^2+b)) (|∇h|^2 - |∇H|^2/n - |h°|^2 |∇H|^2/(|H|^2+b)).
double term_I(int n, double b, double grad_h2, double grad_H2, double normH2, double normh02);

/// -2 theta K f - II for the offset of eps, or nothing when the pinching
/// hypothesis (sphere_pinched with delta) fails. Requires n >= 4.
std::optional<double> term_II_case1_check(const PointCurvature& pc, const SphereAmbient& amb, double eps,
                                          double delta, double theta);

/// -4 n K f - II with b = 0, or nothing unless |h|^2 <= (4/(3n)) |H|^2 and |H| > 0.
std::optional<double> term_II_case2_check(const PointCurvature& pc, const SphereAmbient& amb);

struct TermIBound {
    Rational coefficient;  ///< 3/(n+2) - 1/n - 3/(n(n-1))
    double termI = 0;
    double bound = 0;      ///< -(2/(|H|^2+b)) coefficient |∇H|^2
};

/// Throws std::invalid_argument for n < 4.
TermIBound term_I_bound_check(int n, const SphereAmbient& amb, double eps, double grad_h2, double grad_H2,
                              double normH2, double normh02);

/// e^{2 theta K (t1 - t)} f_max(t1): the lower bound on max f at the earlier
/// time t implied by exponential decay at rate 2 theta K. Requires t < t1.
double decay_bound(double f_max_at_t1, double theta, double K, double t, double t1);

}  // namespace mcf
