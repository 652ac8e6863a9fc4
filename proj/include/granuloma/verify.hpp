/**
 * @file verify.hpp
 * @brief The acceptance suite shared by `granuloma verify` and the
 *        acceptance test binary.
 *
 * Criteria:
 *   1 constants cross-check      4 subcritical decay        7 z-suppression
 *   2 ODE-oracle equivalence     5 supercritical control    8 self-convergence
 *   3 invariant suite            6 semigroup oracle         9 determinism
 *
 * Criterion 9 reruns every selected criterion into a second directory and
 * compares all CSV outputs byte for byte.
 */
#pragma once

#include "granuloma/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace granuloma {

struct VerifyOptions {
    std::string output_dir = "out/verify";
    std::uint64_t seed = 20250101;
    int semigroup_samples = 8;
    int reference_cells = 2048;
    std::vector<int> only;  ///< criteria to run; empty means all
    std::ostream* log = nullptr;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerifySummary {
    std::vector<CriterionResult> criteria;
    bool all_pass() const;
};

/// Title of criterion id (1..9).
std::string criterion_title(int id);

/// "criterion N [title]: PASS|FAIL - detail"
std::string format_criterion(const CriterionResult& r);

/// Runs the selected criteria. Throws only on infrastructure errors (I/O);
/// failed checks are reported in the summary.
VerifySummary run_verify(const VerifyOptions& opts);

/// Default verification scenario: 1D, L = 1, 256 cells, beta = 2, mu = 0.4,
/// q = 4, f linear, xi = 0.45, delta = 0.045, v0 = w0 = z0 = eps * bump with
/// eps = 1e-3, t_end = 200. alpha selects u0 = beta + alpha * bump.
RunConfig default_scenario(double alpha);

/// Byte-compares every *.csv below two directories (relative paths must
/// match). Returns an empty string on success, otherwise a description.
std::string compare_csv_trees(const std::string& a, const std::string& b);

}  // namespace granuloma
