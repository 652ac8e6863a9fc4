#include "granuloma/error.hpp"
#include "granuloma/semigroup.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace granuloma;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kPi = std::numbers::pi;

Field cosine_mode(const BoxDomain& d, int k)
{
    Field f(d.size());
    const double L = d.extents[0];
    for (std::size_t a = 0; a < d.size(); ++a) {
        const int i = static_cast<int>(a % d.cells[0]);
        f[a] = std::cos(k * kPi * d.center(0, i) / L);
    }
    return f;
}

}  // namespace

TEST_CASE("spectral gap")
{
    CHECK(neumann_lambda(BoxDomain::line(1.0, 64)) == doctest::Approx(kPi * kPi).epsilon(1e-15));
    CHECK(neumann_lambda(BoxDomain::rectangle(1.0, 2.0, 8, 16)) == doctest::Approx(kPi * kPi / 4).epsilon(1e-15));
    CHECK(neumann_lambda(BoxDomain::rectangle(kPi, kPi, 8, 8)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("transform round trip")
{
    const BoxDomain d = BoxDomain::rectangle(1.0, 1.0, 12, 9);
    const SpectralDomain sd(d);
    const Field f = band_limited_noise(sd, 9, 5, 0, false);
    const auto back = sd.inverse(sd.forward(f.span()));
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(back[i] == doctest::Approx(f[i]).epsilon(1e-12));
}

TEST_CASE("heat semigroup")
{
    const BoxDomain d = BoxDomain::line(1.0, 128);
    const SpectralDomain sd(d);

    SUBCASE("constants are unchanged")
    {
        const Field c(d.size(), 1.5);
        for (double t : {0.0, 0.1, 10.0}) {
            const Field h = heat_apply(c, t, sd);
            for (double x : h.values) CHECK(x == doctest::Approx(1.5).epsilon(1e-14));
        }
    }
    SUBCASE("t = 0 is the identity")
    {
        const Field f = band_limited_noise(sd, 8, 1, 0, false);
        CHECK(heat_apply(f, 0.0, sd) == f);
    }
    SUBCASE("eigenfunction decay")
    {
        const Field f = cosine_mode(d, 1);
        const Field h = heat_apply(f, 1.0, d);
        const double factor = std::exp(-kPi * kPi);
        for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(h[i] - factor * f[i]) <= 1e-10 * factor);
    }
    SUBCASE("discrete eigenvalues follow the three-point Laplacian")
    {
        const double h = d.spacing(0);
        const double mu = 4.0 / (h * h) * std::pow(std::sin(kPi / (2.0 * 128)), 2);
        CHECK(sd.eigenvalue(1, Eigenvalues::Discrete) == doctest::Approx(mu).epsilon(1e-14));
        CHECK(sd.eigenvalue(1, Eigenvalues::Continuous) == doctest::Approx(kPi * kPi).epsilon(1e-14));
        CHECK(sd.eigenvalue(0, Eigenvalues::Discrete) == 0.0);
    }
    SUBCASE("semigroup property, mean conservation and maximum principle")
    {
        for (const BoxDomain& b : {d, BoxDomain::rectangle(2.0, 1.0, 16, 10)}) {
            const SpectralDomain s(b);
            const Field f = band_limited_noise(s, 10, 3, 1, false);
            const double m = mean(f.span(), b);
            const double top = linf_norm(f.span());
            for (double t : {0.001, 0.01, 0.2}) {
                const Field once = heat_apply(f, 2 * t, s);
                const Field twice = heat_apply(heat_apply(f, t, s), t, s);
                for (std::size_t i = 0; i < b.size(); ++i) CHECK(std::abs(once[i] - twice[i]) <= 1e-10);
                CHECK(std::abs(mean(once.span(), b) - m) <= 1e-12);
                CHECK(linf_norm(once.span()) <= top + 1e-12);
            }
        }
    }
    SUBCASE("negative time is rejected")
    {
        CHECK_THROWS_AS(heat_apply(Field(d.size(), 1.0), -1.0, sd), InvalidArgument);
    }
}

TEST_CASE("noise fields")
{
    const SpectralDomain sd(BoxDomain::line(1.0, 64));
    const Field a = band_limited_noise(sd, 8, 42, 0, true);
    CHECK(a == band_limited_noise(sd, 8, 42, 0, true));
    CHECK_FALSE(a == band_limited_noise(sd, 8, 42, 1, true));
    CHECK(std::abs(mean(a.span(), sd.domain())) < 1e-14);
}

TEST_CASE("constant estimates")
{
    const BoxDomain d = BoxDomain::line(1.0, 64);
    const SpectralDomain sd(d);

    SUBCASE("kind 1 slowest mode ratio")
    {
        // For the first eigenfunction and p = q the ratio is 1 / (1 + 1) at every t.
        const Field f = cosine_mode(d, 1);
        for (double t : {0.01, 0.1, 1.0}) CHECK(constant_ratio(1, 2.0, 2.0, f, t, sd) == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(estimate_constant(1, 2.0, 2.0, d, 4).value >= 0.5 - 1e-9);
    }
    SUBCASE("kind 3 near the identity limit")
    {
        const ConstantEstimate e = estimate_constant(3, 4.0, 4.0, d, 4);
        CHECK(e.value >= 0.5 - 1e-3);
        CHECK_FALSE(e.rigorous);
    }
    SUBCASE("more samples never lower the estimate")
    {
        for (int kind = 1; kind <= 4; ++kind) {
            const double p = kind == 1 || kind == 4 ? kInf : 4.0;
            const double a = estimate_constant(kind, p, 4.0, d, 2, 9).value;
            const double b = estimate_constant(kind, p, 4.0, d, 6, 9).value;
            CHECK(b >= a);
            CHECK(std::isfinite(b));
        }
    }
    SUBCASE("exponent ordering")
    {
        CHECK_THROWS_AS(estimate_constant(1, 2.0, 4.0, d, 2), InvalidArgument);
        CHECK_THROWS_AS(estimate_constant(3, 1.5, 1.5, d, 2), InvalidArgument);
        CHECK_THROWS_AS(estimate_constant(4, 1.0, 1.0, d, 2), InvalidArgument);
        CHECK_THROWS_AS(estimate_constant(5, 2.0, 2.0, d, 2), InvalidArgument);
    }
    SUBCASE("time grid")
    {
        const auto ts = estimate_time_grid(kPi * kPi);
        CHECK(ts.size() == 41);
        CHECK(ts.front() == doctest::Approx(1e-4 / (kPi * kPi)));
        CHECK(ts.back() == doctest::Approx(5.0 / (kPi * kPi)));
    }
}
