#include "granuloma/semigroup.hpp"

#include "granuloma/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace granuloma {

double neumann_lambda(const BoxDomain& d)
{
    d.validate();
    const double longest = d.dim == 1 ? d.extents[0] : std::max(d.extents[0], d.extents[1]);
    const double k = std::numbers::pi / longest;
    return k * k;
}

SpectralDomain::SpectralDomain(const BoxDomain& d) : domain_(d)
{
    d.validate();
    for (int a = 0; a < d.dim; ++a) {
        const int n = d.cells[a];
        auto& tab = table_[a];
        tab.resize(static_cast<std::size_t>(n) * n);
        for (int k = 0; k < n; ++k) {
            for (int i = 0; i < n; ++i) {
                tab[static_cast<std::size_t>(k) * n + i] =
                    std::cos(std::numbers::pi * k * (i + 0.5) / n);
            }
        }
    }
}

void SpectralDomain::transform(std::span<const double> in, std::span<double> out, bool forward) const
{
    const int nx = domain_.cells[0];
    const int ny = domain_.dim == 1 ? 1 : domain_.cells[1];
    if (in.size() != domain_.size() || out.size() != domain_.size()) {
        throw InvalidArgument("field size does not match the spectral grid");
    }
    // Forward: a_k = (w_k / N) sum_i f_i cos_k(i), w_0 = 1, w_k = 2.
    auto along_x = [&](const double* src, double* dst) {
        const auto& tab = table_[0];
        for (int k = 0; k < nx; ++k) {
            double s = 0.0;
            if (forward) {
                const double* row = &tab[static_cast<std::size_t>(k) * nx];
                for (int i = 0; i < nx; ++i) s += row[i] * src[i];
                dst[k] = s * (k == 0 ? 1.0 : 2.0) / nx;
            } else {
                for (int m = 0; m < nx; ++m) s += tab[static_cast<std::size_t>(m) * nx + k] * src[m];
                dst[k] = s;
            }
        }
    };
    std::vector<double> tmp(in.size());
    for (int j = 0; j < ny; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * nx;
        along_x(in.data() + row, tmp.data() + row);
    }
    if (domain_.dim == 1) {
        std::copy(tmp.begin(), tmp.end(), out.begin());
        return;
    }
    const auto& tab = table_[1];
    std::vector<double> col(ny);
    for (int i = 0; i < nx; ++i) {
        for (int m = 0; m < ny; ++m) {
            double s = 0.0;
            if (forward) {
                const double* r = &tab[static_cast<std::size_t>(m) * ny];
                for (int j = 0; j < ny; ++j) s += r[j] * tmp[static_cast<std::size_t>(j) * nx + i];
                col[m] = s * (m == 0 ? 1.0 : 2.0) / ny;
            } else {
                for (int k = 0; k < ny; ++k) {
                    s += tab[static_cast<std::size_t>(k) * ny + m] * tmp[static_cast<std::size_t>(k) * nx + i];
                }
                col[m] = s;
            }
        }
        for (int m = 0; m < ny; ++m) out[static_cast<std::size_t>(m) * nx + i] = col[m];
    }
}

std::vector<double> SpectralDomain::forward(std::span<const double> f) const
{
    std::vector<double> out(f.size());
    transform(f, out, true);
    return out;
}

std::vector<double> SpectralDomain::inverse(std::span<const double> coeffs) const
{
    std::vector<double> out(coeffs.size());
    transform(coeffs, out, false);
    return out;
}

double SpectralDomain::eigenvalue(std::size_t m, Eigenvalues kind) const
{
    const int nx = domain_.cells[0];
    const int kx = static_cast<int>(m % nx);
    const int ky = domain_.dim == 1 ? 0 : static_cast<int>(m / nx);
    auto axis_value = [&](int a, int k) {
        if (kind == Eigenvalues::Continuous) {
            const double w = std::numbers::pi * k / domain_.extents[a];
            return w * w;
        }
        const double h = domain_.spacing(a);
        const double s = std::sin(std::numbers::pi * k / (2.0 * domain_.cells[a]));
        return 4.0 / (h * h) * s * s;
    };
    double mu = axis_value(0, kx);
    if (domain_.dim == 2) mu += axis_value(1, ky);
    return mu;
}

Field heat_apply(const Field& f, double t, const SpectralDomain& sd, Eigenvalues kind)
{
    if (!(t >= 0.0)) throw InvalidArgument("heat_apply needs t >= 0");
    if (t == 0.0) return f;
    auto coeffs = sd.forward(f.span());
    for (std::size_t m = 0; m < coeffs.size(); ++m) coeffs[m] *= std::exp(-sd.eigenvalue(m, kind) * t);
    return Field(sd.inverse(coeffs));
}

Field heat_apply(const Field& f, double t, const BoxDomain& d, Eigenvalues kind)
{
    return heat_apply(f, t, SpectralDomain(d), kind);
}

Field band_limited_noise(const SpectralDomain& sd, int modes, std::uint64_t seed,
                         std::uint64_t sample, bool zero_mean)
{
    const BoxDomain& d = sd.domain();
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(sample), static_cast<std::uint32_t>(sample >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> coeffs(d.size(), 0.0);
    const int nx = d.cells[0];
    const int mx = std::min(modes, nx);
    const int my = d.dim == 1 ? 1 : std::min(modes, d.cells[1]);
    for (int ky = 0; ky < my; ++ky) {
        for (int kx = 0; kx < mx; ++kx) {
            coeffs[static_cast<std::size_t>(ky) * nx + kx] = normal(rng);
        }
    }
    if (zero_mean) coeffs[0] = 0.0;
    return Field(sd.inverse(coeffs));
}

namespace {

void check_ordering(int kind, double p, double q)
{
    if (!(q <= p)) throw InvalidArgument("semigroup estimate needs q <= p");
    switch (kind) {
    case 1:
    case 2:
        if (!(q >= 1.0)) throw InvalidArgument("kinds 1 and 2 need 1 <= q <= p");
        return;
    case 3:
        if (!(q >= 2.0)) throw InvalidArgument("kind 3 needs 2 <= q <= p");
        return;
    case 4:
        if (!(q > 1.0)) throw InvalidArgument("kind 4 needs 1 < q <= p");
        return;
    default: throw InvalidArgument("semigroup constant kind must be 1..4");
    }
}

double inv(double p)
{
    return std::isinf(p) ? 0.0 : 1.0 / p;
}

}  // namespace

std::vector<double> estimate_time_grid(double lambda)
{
    constexpr int points = 41;
    const double lo = std::log(1e-4 / lambda);
    const double hi = std::log(5.0 / lambda);
    std::vector<double> ts(points);
    for (int i = 0; i < points; ++i) ts[i] = std::exp(lo + (hi - lo) * i / (points - 1));
    return ts;
}

double constant_ratio(int kind, double p, double q, const Field& phi, double t,
                      const SpectralDomain& sd)
{
    check_ordering(kind, p, q);
    if (!(t > 0.0)) throw InvalidArgument("constant ratio needs t > 0");
    const BoxDomain& d = sd.domain();
    const double n = d.dim;
    const double lambda = sd.lambda();
    const double smoothing = n / 2.0 * (inv(q) - inv(p));
    const double decay = std::exp(-lambda * t);

    auto coeffs = sd.forward(phi.span());
    double denom = 0.0;
    if (kind == 4) {
        // psi = grad phi on faces; its discrete divergence is the stencil
        // Laplacian, diagonal in the cosine basis.
        for (std::size_t m = 0; m < coeffs.size(); ++m) coeffs[m] *= -sd.eigenvalue(m, Eigenvalues::Discrete);
    }
    for (std::size_t m = 0; m < coeffs.size(); ++m) {
        coeffs[m] *= std::exp(-sd.eigenvalue(m, Eigenvalues::Continuous) * t);
    }
    const auto evolved = sd.inverse(coeffs);

    double numer = 0.0;
    switch (kind) {
    case 1:
        numer = lq_norm(evolved, p, d);
        denom = (1.0 + std::pow(t, -smoothing)) * decay * lq_norm(phi.span(), q, d);
        break;
    case 2:
        numer = grad_lq_norm(evolved, p, d);
        denom = (1.0 + std::pow(t, -0.5 - smoothing)) * decay * lq_norm(phi.span(), q, d);
        break;
    case 3:
        numer = grad_lq_norm(evolved, p, d);
        denom = (1.0 + std::pow(t, -smoothing)) * decay * grad_lq_norm(phi.span(), q, d);
        break;
    case 4:
        numer = lq_norm(evolved, p, d);
        denom = (1.0 + std::pow(t, -0.5 - smoothing)) * decay * grad_lq_norm(phi.span(), q, d);
        break;
    default: break;
    }
    return denom > 0.0 ? numer / denom : 0.0;
}

ConstantEstimate estimate_constant(int kind, double p, double q, const BoxDomain& d, int samples,
                                   std::uint64_t seed)
{
    check_ordering(kind, p, q);
    if (samples < 1) throw InvalidArgument("need at least one sample");
    const SpectralDomain sd(d);
    const auto times = estimate_time_grid(sd.lambda());
    ConstantEstimate est;
    est.samples = samples;
    est.seed = seed;
    auto probe = [&](const Field& phi) {
        for (double t : times) est.value = std::max(est.value, constant_ratio(kind, p, q, phi, t, sd));
    };
    // The slowest eigenfunction first: it attains the lambda-rate exactly.
    std::vector<double> coeffs(d.size(), 0.0);
    const bool along_y = d.dim == 2 && d.extents[1] > d.extents[0];
    coeffs[along_y ? static_cast<std::size_t>(d.cells[0]) : 1] = 1.0;
    probe(Field(sd.inverse(coeffs)));
    for (int s = 0; s < samples; ++s) {
        probe(band_limited_noise(sd, 16, seed, static_cast<std::uint64_t>(s), kind == 1));
    }
    return est;
}

}  // namespace granuloma
