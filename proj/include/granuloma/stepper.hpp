/**
 * @file stepper.hpp
 * @brief Positivity-preserving first-order IMEX time stepping of the
 *        four-field system, the adaptive run driver, and the RK4 oracle for
 *        spatially homogeneous data.
 *
 * One step with frozen time-k coefficients:
 *
 *   u+ = (u + dt (Lu - div(u grad v) + beta)) / (1 + dt (v + 1))
 *   v+ = (v + dt (Lv + v + mu w))             / (1 + dt u)
 *   w+ = (w + dt (Lw + u v))                  / (1 + dt (z + 1))
 *   z+ = (z + dt (Lz - div(z grad w) + f(w) z)) / (1 + dt)
 *
 * Transport is explicit, sources are explicit and nonnegative, linear sinks
 * are implicit. Under cfl_dt every numerator is a nonnegative combination of
 * time-k values, so the update maps nonnegative states to nonnegative states.
 */
#pragma once

#include "granuloma/diagnostics.hpp"
#include "granuloma/grid.hpp"
#include "granuloma/model.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace granuloma {

struct StepConfig {
    double cfl_safety = 0.9;
    double t_end = 200.0;
    double output_interval = 0.5;
    double blowup_threshold = 1e6;
    double dt_floor = 1e-12;

    void validate() const;
    bool operator==(const StepConfig&) const = default;
};

/// cfl_safety / (1/dt_diff + 1/dt_adv) with dt_diff = h^2/(2 dim) and
/// dt_adv = h/(2 dim V_max), V_max the largest face gradient of v and w.
/// Throws TimestepCollapse below cfg.dt_floor.
double cfl_dt(const SimState& s, const BoxDomain& d, const StepConfig& cfg);

/// Same bound from a precomputed V_max.
double cfl_dt_from_speed(double v_max, const BoxDomain& d, const StepConfig& cfg);

/// One IMEX step. Throws BlowUpError if any field leaves blowup_threshold
/// (threshold taken from cfg) or becomes non-finite.
SimState step(const SimState& s, double dt, const BoxDomain& d, const ModelParams& p,
              double blowup_threshold = 1e6);

/// Reusable workspace for repeated stepping without allocation.
class Stepper {
public:
    Stepper(const BoxDomain& d, const ModelParams& p, const StepConfig& cfg);

    /// Advances s by min(cfl_dt, t_target - s.t); lands exactly on t_target
    /// when the remaining interval fits. Returns the dt taken. On blow-up the
    /// state is left unchanged.
    double advance(SimState& s, double t_target);

    /// Fixed-dt step in place (no CFL check).
    void step_fixed(SimState& s, double dt);

    /// Same step through the generic grid operators, bypassing the fused
    /// 1D kernel. For cross-checking.
    void step_reference(SimState& s, double dt);

private:
    double evaluate_operators(const SimState& s);
    void apply_update(SimState& s, double dt);
    // Fused 1D path; bitwise identical to evaluate_operators + apply_update.
    double line_faces(const SimState& s);
    void line_update(SimState& s, double dt);
    void check_and_swap(SimState& s, double dt);

    BoxDomain domain_;
    ModelParams params_;
    StepConfig cfg_;
    std::vector<double> lap_u_, lap_v_, lap_w_, lap_z_, div_u_, div_z_;
    std::vector<double> flux_u_, flux_z_;  // face fluxes, 1D only
    SimState next_;
};

enum class Termination { Completed, BlowUp, TimestepCollapse };
std::string to_string(Termination t);

struct DtStats {
    long long steps = 0;
    double dt_min = 0.0;
    double dt_max = 0.0;
    double dt_mean = 0.0;
};

struct RunResult {
    Trajectory rows;
    Termination termination = Termination::Completed;
    std::string message;
    SimState last_state;  ///< last valid state
    DtStats dt;
};

struct RunOptions {
    DiagnosticsSpec diagnostics;
    /// Invoked with every output-time state (including t = 0) when set.
    std::function<void(const SimState&)> on_output;
};

RunResult run(const SimState& initial, const BoxDomain& d, const ModelParams& p,
              const StepConfig& cfg, const RunOptions& opts);

struct OdeSeries {
    std::vector<double> t, u, v, w, z;

    /// Index of the sample at time t (exact match to within 1e-9).
    std::size_t index_at(double time) const;
};

/// Classic RK4 on the spatially homogeneous system
///   u' = -uv - u + beta, v' = v - uv + mu w, w' = uv - wz - w, z' = f(w) z - z.
/// Samples are recorded every record_interval (a multiple of dt).
OdeSeries ode_oracle(const std::array<double, 4>& y0, const ModelParams& p, double t_end,
                     double dt = 1e-4, double record_interval = 0.01);

}  // namespace granuloma
