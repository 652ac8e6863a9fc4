#include "granuloma/functionals.hpp"

#include "granuloma/error.hpp"

#include <cmath>

namespace granuloma {

namespace {

double admissibility_margin(double p, double ell, double w_star)
{
    return p - 1.0 -
           (p * ell * ell + p * (p - 1.0) * (p - 1.0) * w_star * w_star) /
               (ell * (ell + 1.0 - 2.0 * p * w_star));
}

void check_exponents(double p, double ell)
{
    if (!(p > 1.0) || !std::isfinite(p)) throw InvalidArgument("test function needs p > 1");
    if (!(ell > 0.0 && ell < p - 1.0)) throw InvalidArgument("test function needs 0 < ell < p-1");
}

void check_argument(double y, const TestFunctionParams& tp)
{
    if (!(y >= 0.0 && y <= tp.w_star)) throw InvalidArgument("phi argument outside [0, w_star]");
}

}  // namespace

bool w_star_admissible(double p, double ell, double w_star)
{
    if (!(w_star > 0.0)) return false;
    if (!(w_star < (ell + 1.0) / (2.0 * p))) return false;
    return admissibility_margin(p, ell, w_star) > 0.0;
}

double phi(double y, const TestFunctionParams& tp)
{
    check_argument(y, tp);
    return std::pow(2.0 * tp.w_star - y, -tp.ell);
}

double phi_prime(double y, const TestFunctionParams& tp)
{
    check_argument(y, tp);
    return tp.ell * std::pow(2.0 * tp.w_star - y, -tp.ell - 1.0);
}

double phi_second(double y, const TestFunctionParams& tp)
{
    check_argument(y, tp);
    return tp.ell * (tp.ell + 1.0) * std::pow(2.0 * tp.w_star - y, -tp.ell - 2.0);
}

double kappa(double p, double ell, double w_star)
{
    check_exponents(p, ell);
    if (!w_star_admissible(p, ell, w_star)) {
        throw InvalidArgument("w_star violates the smallness conditions for kappa");
    }
    return p * std::pow(2.0 * w_star, -ell) * admissibility_margin(p, ell, w_star);
}

double find_b0(double p, double ell)
{
    check_exponents(p, ell);
    // The margin is strictly decreasing on [0, (ell+1)/(2p)) and tends to
    // -inf at the right end, so its single root is the supremum.
    double lo = 0.0;
    double hi = (ell + 1.0) / (2.0 * p);
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (w_star_admissible(p, ell, mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

double p_lower_bound(const ModelParams& m)
{
    return m.q * m.n / (m.q - m.n);
}

TestFunctionParams make_test_function_params(const ModelParams& m, double xi,
                                             std::optional<double> p, std::optional<double> ell,
                                             std::optional<double> w_star)
{
    m.validate();
    TestFunctionParams tp;
    tp.p = p.value_or(1.25 * p_lower_bound(m));
    if (!(tp.p > p_lower_bound(m))) throw InvalidArgument("p must exceed q n / (q - n)");
    tp.ell = ell.value_or(0.5 * (tp.p - 1.0));
    check_exponents(tp.p, tp.ell);
    tp.b0 = find_b0(tp.p, tp.ell);
    tp.w_star = w_star.value_or(0.5 * tp.b0);
    if (!(tp.w_star > 0.0 && tp.w_star < tp.b0)) throw InvalidArgument("w_star must lie in (0, b0)");
    tp.kappa = kappa(tp.p, tp.ell, tp.w_star);
    tp.zeta = xi * tp.w_star;
    return tp;
}

double zp_functional(const SimState& s, const TestFunctionParams& tp, const BoxDomain& d)
{
    if (s.z.size() != d.size() || s.w.size() != d.size()) {
        throw InvalidArgument("field size does not match the grid");
    }
    if (linf_norm(s.w.span()) > tp.w_star) throw InvalidArgument("w out of the phi domain");
    double sum = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        sum += std::pow(s.z[i], tp.p) * std::pow(2.0 * tp.w_star - s.w[i], -tp.ell);
    }
    return sum * d.cell_volume();
}

Field combined_vw(const SimState& s, double xi)
{
    Field out(s.v.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = s.v[i] + xi * s.w[i];
    return out;
}

}  // namespace granuloma
