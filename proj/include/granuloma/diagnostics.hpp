/**
 * @file diagnostics.hpp
 * @brief Per-output-time norms, exponential-rate fitting, and the checks that
 *        hold trajectories against the closed-form envelopes.
 */
#pragma once

#include "granuloma/functionals.hpp"
#include "granuloma/grid.hpp"
#include "granuloma/model.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace granuloma {

struct DiagnosticsRow {
    double t = 0.0;
    double linf_u_minus_beta = 0.0;
    double w1q_v = 0.0;
    double w1q_w = 0.0;
    double linf_z = 0.0;
    double l1_mass = 0.0;  ///< |u + w + z|_1
    double linf_vw = 0.0;  ///< |v + xi w|_inf
    double lq_grad_v = 0.0;
    double lq_grad_w = 0.0;
    double lp_z = 0.0;
    std::optional<double> zp_phi;  ///< only while |w|_inf <= w_star

    /// Left side of the four-norm decay statement.
    double four_norm_sum() const { return linf_u_minus_beta + w1q_v + w1q_w + linf_z; }
    bool operator==(const DiagnosticsRow&) const = default;
};

using Trajectory = std::vector<DiagnosticsRow>;

/// What a row needs besides the state.
struct DiagnosticsSpec {
    double beta = 2.0;
    double q = 4.0;
    double xi = 0.45;
    TestFunctionParams tp;
};

DiagnosticsRow compute_row(const SimState& s, const BoxDomain& d, const DiagnosticsSpec& spec);

inline constexpr const char* kDiagnosticsHeader =
    "t,linf_u_minus_beta,w1q_v,w1q_w,linf_z,l1_mass,linf_vw,lq_grad_v,lq_grad_w,lp_z,zp_phi";

void write_diagnostics_csv(std::ostream& os, const Trajectory& traj);
void write_diagnostics_csv(const std::string& path, const Trajectory& traj);
Trajectory read_diagnostics_csv(std::istream& is);
Trajectory read_diagnostics_csv(const std::string& path);

struct RateFit {
    double C = 0.0;
    double rate = 0.0;
    double r2 = 0.0;
};

struct SeriesPoint {
    double t;
    double value;
};

/// Least-squares line through (t, log value) over the last tail_fraction of
/// the points. Throws NoExponentialRegime on nonpositive tail values or when
/// fewer than 10 points fall in the tail.
RateFit fit_rate(const std::vector<SeriesPoint>& series, double tail_fraction = 0.5);

struct CheckReport {
    std::string name;
    bool pass = false;
    bool indeterminate = false;
    double margin = 0.0;  ///< signed; negative means violated
    double t_worst = 0.0;
    std::string notes;
};

/// One JSON object per line.
std::string to_json_line(const CheckReport& r);
void write_reports(const std::string& path, const std::vector<CheckReport>& reports);

/// Margin used for rows whose value is 0 (any envelope is infinitely loose).
inline constexpr double kMarginCap = 1e300;

CheckReport check_mass(const Trajectory& traj, double m_star);

CheckReport check_vw_envelope(const Trajectory& traj, const StabilityWindow& w,
                              const EnvelopeConstants& c, double initial_norm,
                              double tolerance = 1e-2);

CheckReport check_u_envelope(const Trajectory& traj, const EnvelopeConstants& c,
                             const StabilityWindow& w, double grad_v0_q,
                             double tolerance = 1e-2);

CheckReport check_theorem_decay(const Trajectory& traj, double gamma, double tail_fraction = 0.5);

CheckReport check_z_suppression(const Trajectory& traj, const TestFunctionParams& tp,
                                const StabilityWindow& w);

/// Extracts one column as a fit-ready series.
std::vector<SeriesPoint> column(const Trajectory& traj, double DiagnosticsRow::*member);
std::vector<SeriesPoint> four_norm_series(const Trajectory& traj);

}  // namespace granuloma
