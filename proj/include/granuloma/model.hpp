/**
 * @file model.hpp
 * @brief Model parameters and every closed-form constant of the stability
 *        theory: reproduction number, decay-rate window, envelopes,
 *        waiting time and smallness thresholds.
 *
 * All functions here are pure.
 */
#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>

namespace granuloma {

/// Kinetic choice for the T-cell activation term f(w).
enum class Kinetics { Saturating, Linear };

std::string to_string(Kinetics k);
Kinetics kinetics_from_string(const std::string& s);

/// f(w) = w/(1+w) or f(w) = w; both satisfy 0 <= f(s) <= s for s >= 0.
double kinetic_f(Kinetics k, double w);

struct ModelParams {
    double beta = 2.0;  ///< recruitment
    double mu = 0.4;    ///< release rate of bacteria by infected macrophages
    Kinetics f_kind = Kinetics::Linear;
    int n = 1;          ///< spatial dimension
    double q = 4.0;     ///< Sobolev exponent, q > n

    /// Throws InvalidArgument unless beta > 0, mu > 0, q > n, n >= 1.
    void validate() const;
    bool operator==(const ModelParams&) const = default;
};

struct StabilityWindow {
    double xi = 0.0;
    double delta = 0.0;
    double gamma = 0.0;
    double lambda = 0.0;  ///< first nonzero Neumann eigenvalue of -Laplacian
};

/// R0 = (mu beta + 1) / beta.
double reproduction_number(const ModelParams& p);

/// (mu, (beta-1)/beta) when R0 < 1 and beta > 1, otherwise empty.
std::optional<std::pair<double, double>> xi_interval(const ModelParams& p);

/// min{delta, 1 - mu/xi, lambda}; gamma must be chosen strictly below.
double gamma_sup(const ModelParams& p, double xi, double delta, double lambda);

/// Throws InvalidArgument when w violates any of the window inequalities.
void validate_window(const ModelParams& p, const StabilityWindow& w);

/// Default window: xi at the middle of its interval, delta at half its bound,
/// gamma = gamma_fraction * gamma_sup. Explicit overrides win.
StabilityWindow default_window(const ModelParams& p, double lambda,
                               std::optional<double> xi = std::nullopt,
                               std::optional<double> delta = std::nullopt,
                               std::optional<double> gamma = std::nullopt,
                               double gamma_fraction = 0.9);

/// Integral over (0, inf) of (1 + s^a) exp(-rate s), a in (-1, 0].
double s_integral(double a, double rate);

struct EnvelopeConstants {
    double alpha = 0.0;
    double eta = 0.0;
    std::array<double, 4> k_hat{};
    double c_K = 0.0;
    double t_star = 0.0;
    double M = 0.0;
    double M_tilde = 0.0;
    double S1 = 0.0;
    double S2 = 0.0;
    double S3 = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;
    double D = 0.0;
    double eps1 = 0.0;
    double eps2 = 0.0;
    double zeta = 0.0;
    bool rigorous = false;
};

struct EnvelopeInputs {
    double alpha = 0.0;       ///< sup-norm distance of u0 from beta
    double eta = 0.1;         ///< free envelope parameter
    double grad_v0_q = 0.0;   ///< Lq norm of grad v0
    std::array<double, 4> k_hat{1.0, 1.0, 1.0, 1.0};
    bool k_hat_rigorous = false;
    double domain_volume = 1.0;
    double w_star = 0.0;      ///< smallness level for w from the test-function lemma
};

EnvelopeConstants envelope_constants(const ModelParams& p, const StabilityWindow& w,
                                     const EnvelopeInputs& in);

/// alpha e^{-t} + c_K |grad v0|_q e^{-lambda t} + eta e^{-gamma t}
double envelope_g(double t, const EnvelopeConstants& c, const StabilityWindow& w,
                  double grad_v0_q);

/// |v0 + xi w0|_inf e^{(1+gamma) t*} e^{-gamma t}
double vw_envelope(double t, double norm_v0_xi_w0, double gamma, double t_star);

/// Waiting time for a given gamma; used when re-deriving envelopes.
double waiting_time(const ModelParams& p, double xi, double delta, double gamma,
                    double alpha, double c_K, double eta);

}  // namespace granuloma
