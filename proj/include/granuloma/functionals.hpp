/**
 * @file functionals.hpp
 * @brief Test function (2 w* - y)^(-ell) used to suppress z, its coercivity
 *        constant kappa, the constructive search for b0, and the trajectory
 *        functionals built on them.
 */
#pragma once

#include "granuloma/grid.hpp"
#include "granuloma/model.hpp"

#include <optional>

namespace granuloma {

struct TestFunctionParams {
    double p = 0.0;       ///< Lebesgue exponent for z
    double ell = 0.0;     ///< exponent of the weight, 0 < ell < p - 1
    double w_star = 0.0;  ///< sup-norm level for w, 0 < w_star < b0
    double b0 = 0.0;
    double kappa = 0.0;
    double zeta = 0.0;    ///< xi * w_star
};

/// The two smallness conditions on w_star, for given (p, ell).
bool w_star_admissible(double p, double ell, double w_star);

/// Weight function; y must lie in [0, w_star].
double phi(double y, const TestFunctionParams& tp);
double phi_prime(double y, const TestFunctionParams& tp);
double phi_second(double y, const TestFunctionParams& tp);

/// p (2w*)^(-ell) [p - 1 - (p ell^2 + p (p-1)^2 w*^2) / (ell (ell + 1 - 2 p w*))].
/// Throws InvalidArgument when w_star is not admissible.
double kappa(double p, double ell, double w_star);
inline double kappa(const TestFunctionParams& tp) { return kappa(tp.p, tp.ell, tp.w_star); }

/// Supremum of admissible w_star values, bisected to 1e-10.
double find_b0(double p, double ell);

/// Lower bound on p required by the z estimate: q n / (q - n).
double p_lower_bound(const ModelParams& m);

/// Defaults: p = 1.25 q n / (q - n), ell = (p-1)/2, w_star = b0 / 2.
/// Any override is validated against the admissibility conditions.
TestFunctionParams make_test_function_params(const ModelParams& m, double xi,
                                             std::optional<double> p = std::nullopt,
                                             std::optional<double> ell = std::nullopt,
                                             std::optional<double> w_star = std::nullopt);

/// Volume-weighted sum of z^p phi(w); w must stay within [0, w_star].
double zp_functional(const SimState& s, const TestFunctionParams& tp, const BoxDomain& d);

/// Pointwise v + xi w.
Field combined_vw(const SimState& s, double xi);

}  // namespace granuloma
