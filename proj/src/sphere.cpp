#include "mcflow/sphere.hpp"

#include "mcflow/errors.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mcf {

void SphereAmbient::validate() const
{
    if (!(R_amb > 0) || !std::isfinite(R_amb))
        throw std::invalid_argument("ambient sphere radius must be positive");
}

double offset_b(int n, const SphereAmbient& amb, double eps)
{
    amb.validate();
    if (!(eps >= 0 && eps <= 1))
        throw std::invalid_argument("eps must lie in [0, 1]");
    return (1 - eps) * amb.K() * n * (n - 1);
}

double aux_f_value(const PointCurvature& pc, double b)
{
    const CurvatureScalars s = scalars(pc);
    const double denom = s.normH2 + b;
    if (!(denom > 0))
        throw MinimalPointError("f undefined: |H|^2 + b = 0");
    return s.normh02 / denom;
}

SphereAux aux_f(const PointCurvature& pc, const SphereAmbient& amb, double eps)
{
    SphereAux aux;
    aux.eps = eps;
    aux.b = offset_b(pc.n(), amb, eps);
    aux.f = aux_f_value(pc, aux.b);
    return aux;
}

bool sphere_pinched(const PointCurvature& pc, const SphereAmbient& amb, double delta)
{
    const int n = pc.n();
    if (n < 2)
        return false;
    const CurvatureScalars s = scalars(pc);
    return s.normh2 - s.normH2 / (n - 1) <= (2 - delta) * amb.K();
}

namespace {

double assemble_II(int n, double K, double b, double normH2, double normh02, double r1, double r2)
{
    const double denom = normH2 + b;
    if (!(denom > 0))
        throw MinimalPointError("II undefined: |H|^2 + b = 0");
    const double inner = r1 - r2 / n - n * K * normh02 - r2 * normh02 / denom - n * K * normh02 * normH2 / denom;
    return 2 / denom * inner;
}

}  // namespace

double term_II(const PointCurvature& pc, const SphereAmbient& amb, double b)
{
    const CurvatureScalars s = scalars(pc);
    const ReactionTerms rt = reaction_terms(pc);
    return assemble_II(pc.n(), amb.K(), b, s.normH2, s.normh02, rt.r1, rt.r2);
}

double term_II_adapted(const PointCurvature& pc, const SphereAmbient& amb, double b)
{
    const int n = pc.n();
    const AdaptedSplit sp = adapted_split(pc);
    const double H2 = sp.normH * sp.normH;
    const double r2 = sp.normh01sq * H2 + H2 * H2 / n;
    const ReactionTerms rt = reaction_terms(pc);
    return assemble_II(n, amb.K(), b, H2, sp.normh01sq + sp.normhminsq, rt.r1, r2);
}

double term_I(int n, double b, double grad_h2, double grad_H2, double normH2, double normh02)
{
    const double denom = normH2 + b;
    if (!(denom > 0))
        throw MinimalPointError("I undefined: |H|^2 + b = 0");
    return -2 / denom * (grad_h2 - grad_H2 / n - normh02 / denom * grad_H2);
}

std::optional<double> term_II_case1_check(const PointCurvature& pc, const SphereAmbient& amb, double eps,
                                          double delta, double theta)
{
    if (pc.n() < 4)
        throw std::invalid_argument("the case-1 estimate needs n >= 4");
    if (!sphere_pinched(pc, amb, delta))
        return std::nullopt;
    const double b = offset_b(pc.n(), amb, eps);
    const double f = aux_f_value(pc, b);
    return -2 * theta * amb.K() * f - term_II(pc, amb, b);
}

std::optional<double> term_II_case2_check(const PointCurvature& pc, const SphereAmbient& amb)
{
    const int n = pc.n();
    const CurvatureScalars s = scalars(pc);
    if (!(s.normH2 > 0) || !(s.normh2 <= 4.0 / (3.0 * n) * s.normH2))
        return std::nullopt;
    const double f = s.normh02 / s.normH2;
    return -4 * n * amb.K() * f - term_II(pc, amb, 0.0);
}

namespace {

Rational reduce(std::int64_t num, std::int64_t den)
{
    const std::int64_t g = std::gcd(num, den);
    Rational r{num / g, den / g};
    if (r.den < 0) {
        r.num = -r.num;
        r.den = -r.den;
    }
    return r;
}

}  // namespace

TermIBound term_I_bound_check(int n, const SphereAmbient& amb, double eps, double grad_h2, double grad_H2,
                              double normH2, double normh02)
{
    if (n < 4)
        throw std::invalid_argument("the gradient-term bound is only claimed for n >= 4");
    // 3/(n+2) - 1/n - 3/(n(n-1)) over the common denominator n(n-1)(n+2)
    const std::int64_t N = n;
    const std::int64_t den = N * (N - 1) * (N + 2);
    const std::int64_t num = 3 * N * (N - 1) - (N - 1) * (N + 2) - 3 * (N + 2);
    TermIBound out;
    out.coefficient = reduce(num, den);
    const double b = offset_b(n, amb, eps);
    out.termI = term_I(n, b, grad_h2, grad_H2, normH2, normh02);
    out.bound = -2 / (normH2 + b) * out.coefficient.value() * grad_H2;
    return out;
}

double decay_bound(double f_max_at_t1, double theta, double K, double t, double t1)
{
    if (!(t < t1))
        throw std::invalid_argument("decay_bound needs t < t1");
    return std::exp(2 * theta * K * (t1 - t)) * f_max_at_t1;
}

}  // namespace mcf
