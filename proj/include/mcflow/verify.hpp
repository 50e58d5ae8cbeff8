#pragma once

// Randomized falsification suites for the pointwise inequalities.

#include "mcflow/exec.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mcf {

/// One (suite, n, k) cell of a fuzz report. `worstMargin` is the smallest
/// observed slack of the tested inequality in its natural units (negative
/// means the inequality was beaten); a sample is a violation only when its
/// slack falls below the suite tolerance.
struct SuiteRow {
    std::string suite;
    int n = 0;
    int k = 0;
    long samples = 0;
    long violations = 0;
    double worstMargin = 0;
    std::uint64_t seed = 0;
    /// Probes outside the proven regime are reported but never fail a run.
    bool asserted = true;
};

struct VerifyOptions {
    long samples = 10000;
    std::uint64_t seed = 42;
    std::optional<int> n;
    std::optional<int> k;
    std::optional<double> c;      ///< reaction suite ratio bound
    std::optional<double> eps;    ///< operator-pinch margin; sphere offset eps otherwise
    std::optional<double> delta;  ///< sphere-case1 pinching slack
    double R_amb = 1;
    Exec exec = Exec::Parallel;
};

/// lemma31, operator-pinch, reaction, adapted-r2, sphere-case1,
/// sphere-case2, f-bound.
std::span<const std::string_view> suite_names();
bool is_suite(std::string_view name);

/// Runs one suite (or "all") over its default dimension ranges, narrowed by
/// options.n / options.k. Samples are split over a fixed number of shards
/// with independent generators, so results do not depend on thread count.
/// Throws std::invalid_argument for unknown suites or bad options.
std::vector<SuiteRow> run_suite(std::string_view suite, const VerifyOptions& options);

/// Number of asserted violations.
long total_violations(std::span<const SuiteRow> rows);

/// suite,n,k,samples,violations,worstMargin,seed
void write_fuzz_csv(std::ostream& os, std::span<const SuiteRow> rows);

}  // namespace mcf
