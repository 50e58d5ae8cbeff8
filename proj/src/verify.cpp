#include "mcflow/verify.hpp"

#include "mcflow/curvature.hpp"
#include "mcflow/grid.hpp"
#include "mcflow/sampling.hpp"
#include "mcflow/sphere.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace mcf {

namespace {

constexpr std::array<std::string_view, 7> kSuites{"lemma31",      "operator-pinch", "reaction",
                                                  "adapted-r2",   "sphere-case1",   "sphere-case2",
                                                  "f-bound"};
constexpr int kShards = 16;

/// Outcome of one sample: nothing when the draw failed the suite hypothesis.
using Sampler = std::function<std::optional<double>(Rng&)>;

struct Cell {
    std::string suite;
    int n;
    int k;
    double tolerance;  ///< violation when margin < -tolerance
    bool asserted;
    std::uint64_t stream;
    Sampler sample;
};

struct ShardResult {
    long samples = 0;
    long violations = 0;
    double worst = std::numeric_limits<double>::infinity();
};

SuiteRow run_cell(const Cell& cell, const VerifyOptions& opt)
{
    std::array<ShardResult, kShards> shards{};
    auto run_shard = [&](int s) {
        const long count = opt.samples / kShards + (s < opt.samples % kShards ? 1 : 0);
        Rng rng = make_rng(opt.seed, {cell.stream, static_cast<std::uint64_t>(cell.n),
                                      static_cast<std::uint64_t>(cell.k), static_cast<std::uint64_t>(s)});
        ShardResult& r = shards[s];
        for (long i = 0; i < count; ++i) {
            const std::optional<double> m = cell.sample(rng);
            if (!m)
                continue;
            ++r.samples;
            if (!(*m >= -cell.tolerance))
                ++r.violations;
            r.worst = std::min(r.worst, *m);
        }
    };
    if (opt.exec == Exec::Serial) {
        for (int s = 0; s < kShards; ++s)
            run_shard(s);
    }
    else {
#pragma omp parallel for schedule(dynamic, 1)
        for (int s = 0; s < kShards; ++s)
            run_shard(s);
    }
    SuiteRow row;
    row.suite = cell.suite;
    row.n = cell.n;
    row.k = cell.k;
    row.seed = opt.seed;
    row.asserted = cell.asserted;
    row.worstMargin = std::numeric_limits<double>::infinity();
    for (const auto& r : shards) {
        row.samples += r.samples;
        row.violations += r.violations;
        row.worstMargin = std::min(row.worstMargin, r.worst);
    }
    return row;
}

double sq(double x) { return x * x; }

/// log-uniform |H|^2 in [1e-2, 1e2] K
double draw_normH2(Rng& rng, double K)
{
    std::uniform_real_distribution<double> u(std::log(1e-2), std::log(1e2));
    return K * std::exp(u(rng));
}

std::vector<int> range_or(const std::optional<int>& pick, int lo, int hi)
{
    if (pick)
        return {*pick};
    std::vector<int> v;
    for (int i = lo; i <= hi; ++i)
        v.push_back(i);
    return v;
}

void add_lemma31(std::vector<Cell>& cells, const VerifyOptions& opt)
{
    for (int n : range_or(opt.n, 2, 8)) {
        if (n < 2)
            throw std::invalid_argument("lemma31 needs n >= 2");
        cells.push_back({"lemma31", n, 0, 1e-10, true, 1, [n](Rng& rng) -> std::optional<double> {
                             const Eigen::MatrixXd B = random_symmetric(rng, n);
                             const double scale = 1 + B.squaredNorm();
                             double worst = std::numeric_limits<double>::infinity();
                             for (int i1 = 0; i1 < n; ++i1)
                                 for (int i2 = i1 + 1; i2 < n; ++i2) {
                                     const IdentitySides s = lemma_identity(B, i1, i2);
                                     worst = std::min(worst, -std::abs(s.lhs - s.rhs) / scale);
                                 }
                             return worst;
                         }});
    }
}

void add_operator_pinch(std::vector<Cell>& cells, const VerifyOptions& opt)
{
    const std::vector<double> eps_list = opt.eps ? std::vector<double>{*opt.eps} : std::vector<double>{0.01, 0.1};
    for (std::size_t e = 0; e < eps_list.size(); ++e)
        for (int n : range_or(opt.n, 2, 6))
            for (int k : range_or(opt.k, 1, 4)) {
                if (n < 2)
                    throw std::invalid_argument("operator-pinch needs n >= 2");
                const double eps = eps_list[e];
                const double c = 1.0 / (n - 1) - eps;
                if (!(c > 1.0 / n))
                    continue;  // the pinching cone is empty
                const std::string name = "operator-pinch@eps=" + format17(eps);
                cells.push_back({name, n, k, 0.0, true, 100 + e,
                                 [n, k, c, eps](Rng& rng) -> std::optional<double> {
                                     const PointCurvature pc = pinched_sample(rng, n, k, c);
                                     const CurvatureScalars s = scalars(pc);
                                     if (!(s.normh2 - s.normH2 / (n - 1) <= -eps * s.normH2))
                                         return std::nullopt;
                                     const double lam = gauss_operator(pc).min_eigenvalue;
                                     return lam - (eps / 2 * s.normH2 - 1e-9 * s.normh2);
                                 }});
            }
}

void add_reaction(std::vector<Cell>& cells, const VerifyOptions& opt)
{
    for (int n : range_or(opt.n, 2, 4))
        for (int k : range_or(opt.k, 1, 4)) {
            if (n < 2)
                throw std::invalid_argument("reaction needs n >= 2");
            auto make = [n, k](double c) {
                return [n, k, c](Rng& rng) -> std::optional<double> {
                    const PointCurvature pc = pinched_sample(rng, n, k, c);
                    const CurvatureScalars s = scalars(pc);
                    if (!(s.normH2 > 0))
                        return std::nullopt;
                    const ReactionTerms rt = reaction_terms(pc);
                    // strict inequality: R1 - cR2 = 0 counts as a violation
                    const double m = (c * rt.r2 - rt.r1) / sq(s.normH2);
                    return m > 0 ? m : std::min(m, -std::numeric_limits<double>::min());
                };
            };
            if (opt.c) {
                if (!(*opt.c > 1.0 / n))
                    throw std::invalid_argument("reaction needs c > 1/n");
                cells.push_back({"reaction", n, k, 0.0, true, 3, make(*opt.c)});
            }
            else {
                cells.push_back({"reaction", n, k, 0.0, true, 3, make(4.0 / (3.0 * n) - 0.01)});
                cells.push_back({"reaction-endpoint", n, k, 0.0, false, 4, make(4.0 / (3.0 * n))});
            }
        }
}

void add_adapted(std::vector<Cell>& cells, const VerifyOptions& opt)
{
    for (int n : range_or(opt.n, 2, 5))
        for (int k : range_or(opt.k, 1, 4)) {
            cells.push_back({"adapted-r2", n, k, 1e-10, true, 5, [n, k](Rng& rng) -> std::optional<double> {
                                 const PointCurvature pc = random_curvature(rng, n, k);
                                 const CurvatureScalars s = scalars(pc);
                                 if (!(s.normH2 > 0))
                                     return std::nullopt;
                                 // relative residual of R2 = |h°_1|^2|H|^2 + |H|^4/n
                                 const AdaptedSplit sp = adapted_split(pc);
                                 const double r2 = reaction_terms(pc).r2;
                                 const double H2 = sp.normH * sp.normH;
                                 return -std::abs(r2 - (sp.normh01sq * H2 + H2 * H2 / n)) / std::max(r2, 1e-300);
                             }});
            cells.push_back({"reaction-gap", n, k, 1e-10, true, 6, [n, k](Rng& rng) -> std::optional<double> {
                                 const PointCurvature pc = random_curvature(rng, n, k);
                                 const CurvatureScalars s = scalars(pc);
                                 if (!(s.normH2 > 0))
                                     return std::nullopt;
                                 return reaction_estimate_gap(pc) / (1 + sq(s.normh2));
                             }});
        }
}

void add_case1(std::vector<Cell>& cells, const VerifyOptions& opt)
{
    const SphereAmbient amb{opt.R_amb};
    const double K = amb.K();
    const double eps = opt.eps.value_or(1e-3);
    const double theta = 2 * eps;
    for (int n : range_or(opt.n, 4, 6))
        for (int k : range_or(opt.k, 1, 4)) {
            if (n < 4)
                throw std::invalid_argument("sphere-case1 needs n >= 4");
            const double delta = opt.delta.value_or(n == 4 ? 0.1 : 0.0);
            cells.push_back({"sphere-case1@delta=" + format17(delta), n, k, 1e-10, true, 7,
                             [=](Rng& rng) -> std::optional<double> {
                                 const double H2 = draw_normH2(rng, K);
                                 const double budget = H2 / (n * (n - 1)) + (2 - delta) * K;
                                 const PointCurvature pc = adapted_sample(rng, n, k, H2, budget);
                                 const auto m = term_II_case1_check(pc, amb, eps, delta, theta);
                                 if (!m)
                                     return std::nullopt;
                                 return *m / K;
                             }});
        }
}

void add_case2(std::vector<Cell>& cells, const VerifyOptions& opt)
{
    const SphereAmbient amb{opt.R_amb};
    const double K = amb.K();
    for (int n : range_or(opt.n, 2, 6))
        for (int k : range_or(opt.k, 1, 4)) {
            if (n < 2)
                throw std::invalid_argument("sphere-case2 needs n >= 2");
            cells.push_back({"sphere-case2", n, k, 1e-10, true, 8, [=](Rng& rng) -> std::optional<double> {
                                 const double H2 = draw_normH2(rng, K);
                                 const PointCurvature pc = adapted_sample(rng, n, k, H2, H2 / (3.0 * n));
                                 const auto m = term_II_case2_check(pc, amb);
                                 if (!m)
                                     return std::nullopt;
                                 return *m / K;
                             }});
        }
}

void add_fbound(std::vector<Cell>& cells, const VerifyOptions& opt)
{
    const SphereAmbient amb{opt.R_amb};
    const double K = amb.K();
    const double eps = opt.eps.value_or(1e-3);
    for (int n : range_or(opt.n, 5, 7))
        for (int k : range_or(opt.k, 1, 4)) {
            if (n < 3)
                throw std::invalid_argument("f-bound needs n >= 3");
            cells.push_back({"f-bound", n, k, 1e-12, true, 9, [=](Rng& rng) -> std::optional<double> {
                                 const double H2 = draw_normH2(rng, K);
                                 const PointCurvature pc =
                                     adapted_sample(rng, n, k, H2, H2 / (n * (n - 1)) + 2 * K);
                                 if (!sphere_pinched(pc, amb, 0.0))
                                     return std::nullopt;
                                 return 1 - aux_f(pc, amb, eps).f;
                             }});
        }
}

}  // namespace

std::span<const std::string_view> suite_names()
{
    return kSuites;
}

bool is_suite(std::string_view name)
{
    return name == "all" || std::find(kSuites.begin(), kSuites.end(), name) != kSuites.end();
}

std::vector<SuiteRow> run_suite(std::string_view suite, const VerifyOptions& opt)
{
    if (!is_suite(suite))
        throw std::invalid_argument("unknown suite '" + std::string(suite) + "'");
    if (opt.samples < 1)
        throw std::invalid_argument("need at least one sample");
    if (opt.n && *opt.n < 1)
        throw std::invalid_argument("n must be positive");
    if (opt.k && *opt.k < 1)
        throw std::invalid_argument("k must be positive");
    SphereAmbient{opt.R_amb}.validate();

    std::vector<Cell> cells;
    const bool all = suite == "all";
    if (all || suite == "lemma31")
        add_lemma31(cells, opt);
    if (all || suite == "operator-pinch")
        add_operator_pinch(cells, opt);
    if (all || suite == "reaction")
        add_reaction(cells, opt);
    if (all || suite == "adapted-r2")
        add_adapted(cells, opt);
    if (all || suite == "sphere-case1")
        add_case1(cells, opt);
    if (all || suite == "sphere-case2")
        add_case2(cells, opt);
    if (all || suite == "f-bound")
        add_fbound(cells, opt);

    std::vector<SuiteRow> rows;
    rows.reserve(cells.size());
    for (const auto& cell : cells)
        rows.push_back(run_cell(cell, opt));
    return rows;
}

long total_violations(std::span<const SuiteRow> rows)
{
    long v = 0;
    for (const auto& r : rows)
        if (r.asserted)
            v += r.violations;
    return v;
}

void write_fuzz_csv(std::ostream& os, std::span<const SuiteRow> rows)
{
    os << "suite,n,k,samples,violations,worstMargin,seed\n";
    for (const auto& r : rows)
        os << r.suite << ',' << r.n << ',' << r.k << ',' << r.samples << ',' << r.violations << ','
           << format17(r.worstMargin) << ',' << r.seed << '\n';
}

}  // namespace mcf
