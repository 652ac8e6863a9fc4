#include "granuloma/model.hpp"

#include "granuloma/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace granuloma {

namespace {

void require_finite(double x, const char* what)
{
    if (!std::isfinite(x)) {
        throw InvalidArgument(std::string(what) + " must be finite");
    }
}

}  // namespace

std::string to_string(Kinetics k)
{
    return k == Kinetics::Saturating ? "saturating" : "linear";
}

Kinetics kinetics_from_string(const std::string& s)
{
    if (s == "saturating") return Kinetics::Saturating;
    if (s == "linear") return Kinetics::Linear;
    throw InvalidArgument("unknown kinetics '" + s + "' (expected saturating|linear)");
}

double kinetic_f(Kinetics k, double w)
{
    return k == Kinetics::Saturating ? w / (1.0 + w) : w;
}

void ModelParams::validate() const
{
    require_finite(beta, "beta");
    require_finite(mu, "mu");
    require_finite(q, "q");
    if (!(beta > 0.0)) throw InvalidArgument("beta must be > 0");
    if (!(mu > 0.0)) throw InvalidArgument("mu must be > 0");
    if (n < 1) throw InvalidArgument("dimension n must be >= 1");
    if (!(q > n)) throw InvalidArgument("q must exceed the dimension n");
}

double reproduction_number(const ModelParams& p)
{
    require_finite(p.beta, "beta");
    require_finite(p.mu, "mu");
    if (!(p.beta > 0.0)) throw InvalidArgument("beta must be > 0");
    return (p.mu * p.beta + 1.0) / p.beta;
}

std::optional<std::pair<double, double>> xi_interval(const ModelParams& p)
{
    if (!(p.beta > 1.0) || !(reproduction_number(p) < 1.0)) return std::nullopt;
    const double upper = (p.beta - 1.0) / p.beta;
    if (!(p.mu < upper)) return std::nullopt;
    return std::make_pair(p.mu, upper);
}

double gamma_sup(const ModelParams& p, double xi, double delta, double lambda)
{
    const auto interval = xi_interval(p);
    if (!interval) throw InvalidArgument("no admissible xi: R0 >= 1 or beta <= 1");
    if (!(xi > interval->first && xi < interval->second)) {
        throw InvalidArgument("xi outside (mu, (beta-1)/beta)");
    }
    if (!(delta > 0.0 && delta < (1.0 - xi) * p.beta - 1.0)) {
        throw InvalidArgument("delta must satisfy 0 < delta < (1-xi)*beta - 1");
    }
    if (!(lambda > 0.0)) throw InvalidArgument("lambda must be > 0");
    return std::min({delta, 1.0 - p.mu / xi, lambda});
}

void validate_window(const ModelParams& p, const StabilityWindow& w)
{
    const double sup = gamma_sup(p, w.xi, w.delta, w.lambda);
    if (!(w.gamma > 0.0 && w.gamma < sup)) {
        throw InvalidArgument("gamma must satisfy 0 < gamma < min{delta, 1-mu/xi, lambda}");
    }
}

StabilityWindow default_window(const ModelParams& p, double lambda, std::optional<double> xi,
                               std::optional<double> delta, std::optional<double> gamma,
                               double gamma_fraction)
{
    const auto interval = xi_interval(p);
    if (!interval) throw InvalidArgument("no admissible window: R0 >= 1 or beta <= 1");
    StabilityWindow w;
    w.lambda = lambda;
    w.xi = xi.value_or(0.5 * (interval->first + interval->second));
    w.delta = delta.value_or(0.5 * ((1.0 - w.xi) * p.beta - 1.0));
    if (!(gamma_fraction > 0.0 && gamma_fraction < 1.0)) {
        throw InvalidArgument("gamma fraction must lie in (0, 1)");
    }
    w.gamma = gamma.value_or(gamma_fraction * gamma_sup(p, w.xi, w.delta, lambda));
    validate_window(p, w);
    return w;
}

double s_integral(double a, double rate)
{
    require_finite(a, "exponent");
    require_finite(rate, "rate");
    if (!(a > -1.0)) throw InvalidArgument("s_integral diverges for exponent <= -1");
    if (a > 0.0) throw InvalidArgument("s_integral exponent must be <= 0");
    if (!(rate > 0.0)) throw InvalidArgument("s_integral rate must be > 0");
    return 1.0 / rate + std::tgamma(a + 1.0) * std::pow(rate, -(a + 1.0));
}

double waiting_time(const ModelParams& p, double xi, double delta, double gamma, double alpha,
                    double c_K, double eta)
{
    const double lower = p.beta - (1.0 + delta) / (1.0 - xi);
    const double top = alpha + c_K + eta;
    if (top <= lower) return 0.0;
    return std::log(top / lower) / gamma;
}

EnvelopeConstants envelope_constants(const ModelParams& p, const StabilityWindow& w,
                                     const EnvelopeInputs& in)
{
    p.validate();
    validate_window(p, w);
    if (!(w.gamma < 1.0)) throw InvalidArgument("gamma must be < 1 for the 1/(1-gamma) factor");
    if (!(in.alpha >= 0.0) || !(in.eta > 0.0) || !(in.grad_v0_q >= 0.0) ||
        !(in.domain_volume > 0.0) || !(in.w_star >= 0.0)) {
        throw InvalidArgument("envelope inputs must be nonnegative (eta, volume positive)");
    }
    for (double k : in.k_hat) {
        if (!(k >= 0.0) || !std::isfinite(k)) throw InvalidArgument("k_hat must be finite, >= 0");
    }

    const auto& k = in.k_hat;
    const double n = p.n;
    const double base = in.alpha + p.beta + in.eta;
    const double vol_q = std::pow(in.domain_volume, 1.0 / p.q);

    EnvelopeConstants c;
    c.alpha = in.alpha;
    c.eta = in.eta;
    c.k_hat = k;
    c.rigorous = in.k_hat_rigorous;

    c.S1 = s_integral(-0.5, w.lambda - w.gamma);
    c.S2 = s_integral(-0.5 - n / (2.0 * p.q), 1.0);
    c.S3 = s_integral(-0.5 - n / (2.0 * p.q), w.lambda + 1.0 - w.gamma);

    c.c_K = k[2] * k[3] * base * c.S2;
    c.t_star = waiting_time(p, w.xi, w.delta, w.gamma, in.alpha, c.c_K, in.eta);
    const double growth = std::exp((1.0 + w.gamma) * c.t_star);

    c.M = base + c.c_K * in.grad_v0_q - 1.0;
    c.M_tilde = (1.0 + k[2] * k[3] * c.S2) * base;

    const double mu_xi = p.mu / w.xi;
    c.C1 = k[1] * c.S1 * vol_q * (c.M + mu_xi) * growth;
    c.C2 = (k[1] * k[3] * c.S1 * c.S3 * vol_q * (c.M + mu_xi) + 1.0 / (1.0 - w.gamma)) *
           (c.M + 1.0) * growth;
    c.D = k[2] * k[3] * c.S2 * c.c_K +
          (k[1] * k[3] * c.S1 * c.S3 * vol_q * c.M_tilde + 1.0 / (1.0 - w.gamma)) * c.M_tilde *
              growth;

    c.eps1 = c.D > 0.0 ? std::min(1.0, in.eta / (2.0 * c.D)) : 1.0;
    c.zeta = w.xi * in.w_star;
    // The z-smallness condition at t0 = 0 is only needed when n >= 3.
    c.eps2 = p.n >= 3 ? std::min(c.eps1, c.zeta / growth) : c.eps1;
    return c;
}

double envelope_g(double t, const EnvelopeConstants& c, const StabilityWindow& w, double grad_v0_q)
{
    if (!(t >= 0.0)) throw InvalidArgument("envelope_g needs t >= 0");
    return c.alpha * std::exp(-t) + c.c_K * grad_v0_q * std::exp(-w.lambda * t) +
           c.eta * std::exp(-w.gamma * t);
}

double vw_envelope(double t, double norm_v0_xi_w0, double gamma, double t_star)
{
    if (!(t >= 0.0)) throw InvalidArgument("vw_envelope needs t >= 0");
    return norm_v0_xi_w0 * std::exp((1.0 + gamma) * t_star) * std::exp(-gamma * t);
}

}  // namespace granuloma
