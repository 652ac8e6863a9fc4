/**
 * @file scenario.hpp
 * @brief Turns a RunConfig into a resolved run (initial state, window,
 *        constants, test-function parameters) and drives simulate, sweep
 *        and the constants report.
 */
#pragma once

#include "granuloma/config.hpp"
#include "granuloma/diagnostics.hpp"
#include "granuloma/functionals.hpp"
#include "granuloma/model.hpp"
#include "granuloma/stepper.hpp"

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace granuloma {

enum class Regime { Subcritical, Supercritical, NotApplicable };
std::string to_string(Regime r);

/// Subcritical iff R0 < 1 and beta > 1; not applicable when beta <= 1.
Regime classify(const ModelParams& p);

/// Exponent pairs (p, q) used for the four semigroup constants:
/// K1 (inf, q), K2 (q, q), K3 (q, q), K4 (inf, q).
std::array<std::pair<double, double>, 4> k_hat_exponents(double q);

/// Empirical K-hat values on a copy of d with at most 128 cells per axis.
std::array<double, 4> estimate_k_hat(const BoxDomain& d, double q, int samples, std::uint64_t seed);

struct ResolvedRun {
    RunConfig config;
    SimState initial;
    double lambda = 0.0;
    double r0 = 0.0;
    Regime regime = Regime::NotApplicable;
    std::optional<StabilityWindow> window;
    std::string window_note;  ///< why there is no window
    double xi = 0.0;          ///< xi used for v + xi w diagnostics
    double check_gamma = 0.0; ///< rate the decay check asks for
    TestFunctionParams tp;
    std::array<double, 4> k_hat{1.0, 1.0, 1.0, 1.0};
    std::string k_source = "config";
    std::optional<EnvelopeConstants> constants;
    double alpha = 0.0;
    double grad_v0_q = 0.0;
    double vw0 = 0.0;
    double m_star = 0.0;

    DiagnosticsSpec diagnostics() const;
};

/// Validates and resolves; with_constants = false skips the K estimation and
/// envelope constants (diagnostics only).
ResolvedRun resolve(const RunConfig& c, bool with_constants = true);

struct SimulationOutput {
    ResolvedRun setup;
    RunResult result;
    std::vector<CheckReport> checks;
};

/// Checks that apply to the resolved regime.
std::vector<CheckReport> run_checks(const ResolvedRun& r, const Trajectory& traj);

/// Runs a resolved configuration. When dir is nonempty, writes
/// diagnostics.csv, checks.jsonl, run_manifest.json and (if enabled)
/// snapshots/ there, creating the directory.
SimulationOutput simulate(const RunConfig& c, const std::string& dir, bool with_constants = true);

/// Deterministic JSON manifest of a finished run.
std::string manifest_json(const SimulationOutput& out);

/// "key = value" lines of the constants report. estimate_samples overrides
/// the configured K-hat values with a fresh estimate.
std::vector<std::pair<std::string, std::string>> constants_report(
    const RunConfig& c, std::optional<int> estimate_samples = std::nullopt);

/// Canonical config key for a sweep axis ("beta", "mu", "epsilon" or a key).
std::string sweep_axis_key(const std::string& axis);

struct SweepPoint {
    double value = 0.0;
    double r0 = 0.0;
    std::string termination;
    std::optional<RateFit> fit;  ///< of linf_vw
    bool decay_pass = false;
    std::string error;
};

/// Linearly spaced points (a single point when points == 1). Points run
/// concurrently; per-point failures are recorded, not thrown. When dir is
/// nonempty each point writes its run into dir/point_NNN.
std::vector<SweepPoint> sweep(const RunConfig& base, const std::string& axis, double from, double to,
                              int points, const std::string& dir = "");

void write_sweep_csv(const std::string& path, const std::string& axis, const std::vector<SweepPoint>& pts);

struct BisectResult {
    double lo = 0.0;  ///< largest probed epsilon that passed
    double hi = 0.0;  ///< smallest probed epsilon that failed
    bool bracketed = false;
    std::vector<SweepPoint> probes;
    std::optional<double> eps2;  ///< theoretical threshold, when a window exists
};

/// Geometric bisection over initial.epsilon until hi/lo - 1 <= rel_width.
/// A probe passes when the run completes and check_theorem_decay passes.
BisectResult bisect_epsilon(const RunConfig& base, double lo, double hi, double rel_width = 0.1);

}  // namespace granuloma
