#include "granuloma/error.hpp"
#include "granuloma/grid.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace granuloma;

namespace {

Field random_field(std::size_t n, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    Field f(n);
    for (double& x : f.values) x = u(rng);
    return f;
}

double weighted_sum(const Field& f, const BoxDomain& d)
{
    double s = 0.0;
    for (double x : f.values) s += x;
    return s * d.cell_volume();
}

}  // namespace

TEST_CASE("domain geometry")
{
    const BoxDomain a = BoxDomain::line(2.0, 8);
    CHECK(a.spacing(0) == 0.25);
    CHECK(a.size() == 8);
    CHECK(a.center(0, 0) == 0.125);
    CHECK(a.volume() == 2.0);
    const BoxDomain b = BoxDomain::rectangle(1.0, 2.0, 4, 8);
    CHECK(b.size() == 32);
    CHECK(b.cell_volume() == doctest::Approx(0.0625));
    CHECK_THROWS_AS(BoxDomain::line(1.0, 0), InvalidArgument);
    CHECK_THROWS_AS(BoxDomain::line(-1.0, 4), InvalidArgument);
}

TEST_CASE("laplacian")
{
    SUBCASE("constant field")
    {
        const BoxDomain d = BoxDomain::rectangle(1.0, 1.0, 7, 5);
        const Field lap = laplacian(Field(d.size(), 3.25), d);
        for (double x : lap.values) CHECK(x == 0.0);
    }
    SUBCASE("three-cell stencil with mirror ghosts")
    {
        const BoxDomain d = BoxDomain::line(3.0, 3);
        const Field lap = laplacian(Field(std::vector<double>{0.0, 1.0, 0.0}), d);
        CHECK(lap[0] == 1.0);
        CHECK(lap[1] == -2.0);
        CHECK(lap[2] == 1.0);
    }
    SUBCASE("cosine eigenfunction converges at second order")
    {
        double prev = 0.0;
        for (int n : {64, 128, 256, 512}) {
            const BoxDomain d = BoxDomain::line(1.0, n);
            Field f(d.size());
            for (int i = 0; i < n; ++i) f[i] = std::cos(std::numbers::pi * d.center(0, i));
            const Field lap = laplacian(f, d);
            const double k2 = std::numbers::pi * std::numbers::pi;
            double err = 0.0;
            for (int i = 0; i < n; ++i) err = std::max(err, std::abs(lap[i] + k2 * f[i]));
            err /= k2;
            if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.05));
            prev = err;
        }
    }
}

TEST_CASE("chemo_divergence")
{
    SUBCASE("hand example")
    {
        const BoxDomain d = BoxDomain::line(3.0, 3);
        const Field div = chemo_divergence(Field(std::vector<double>{1.0, 2.0, 3.0}), Field(std::vector<double>{0.0, 1.0, 2.0}), d);
        // Face fluxes 1 and 2 leave through the right faces: div(c grad v) = (1, 1, -2).
        CHECK(div[0] == 1.0);
        CHECK(div[1] == 1.0);
        CHECK(div[2] == -2.0);
    }
    SUBCASE("constant potential")
    {
        std::mt19937_64 rng(3);
        const BoxDomain d = BoxDomain::rectangle(1.0, 1.0, 6, 6);
        const Field div = chemo_divergence(random_field(d.size(), rng), Field(d.size(), 4.0), d);
        for (double x : div.values) CHECK(x == 0.0);
    }
    SUBCASE("constant carrier factorizes")
    {
        std::mt19937_64 rng(5);
        const BoxDomain d = BoxDomain::rectangle(1.0, 1.0, 8, 8);
        const Field v = random_field(d.size(), rng);
        const Field div = chemo_divergence(Field(d.size(), 2.5), v, d);
        const Field lap = laplacian(v, d);
        for (std::size_t i = 0; i < d.size(); ++i) CHECK(div[i] == doctest::Approx(2.5 * lap[i]).epsilon(1e-12));
    }
}

TEST_CASE("operators are conservative")
{
    std::mt19937_64 rng(9);
    for (const BoxDomain& d : {BoxDomain::line(1.0, 50), BoxDomain::rectangle(2.0, 1.0, 12, 9)}) {
        for (int k = 0; k < 10; ++k) {
            const Field c = random_field(d.size(), rng);
            const Field v = random_field(d.size(), rng);
            const double scale = 1.0 / (d.h_min() * d.h_min());
            CHECK(std::abs(weighted_sum(laplacian(v, d), d)) <= 1e-12 * scale);
            CHECK(std::abs(weighted_sum(chemo_divergence(c, v, d), d)) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("upwind transport preserves nonnegativity under the advective CFL")
{
    std::mt19937_64 rng(13);
    for (const BoxDomain& d : {BoxDomain::line(1.0, 40), BoxDomain::rectangle(1.0, 1.0, 10, 10)}) {
        for (int k = 0; k < 20; ++k) {
            const Field c = random_field(d.size(), rng);
            const Field v = random_field(d.size(), rng, 0.0, 5.0);
            const double vmax = max_face_gradient(v.span(), d);
            const double dt = d.h_min() / (2.0 * d.dim * vmax);
            const Field div = chemo_divergence(c, v, d);
            for (std::size_t i = 0; i < d.size(); ++i) CHECK(c[i] - dt * div[i] >= -1e-14);
        }
    }
}

TEST_CASE("norms")
{
    const BoxDomain d = BoxDomain::line(1.0, 100);
    Field x(d.size());
    for (int i = 0; i < 100; ++i) x[i] = d.center(0, i);

    SUBCASE("gradient of the identity")
    {
        // 99 interior faces with unit gradient; the deficit is the two half boundary cells.
        CHECK(std::abs(grad_lq_norm(x.span(), 2.0, d) - std::sqrt(0.99)) < 1e-12);
        const BoxDomain fine = BoxDomain::line(1.0, 100000);
        Field y(fine.size());
        for (int i = 0; i < 100000; ++i) y[i] = fine.center(0, i);
        CHECK(std::abs(grad_lq_norm(y.span(), 2.0, fine) - 1.0) < 1e-5);
    }
    SUBCASE("basic values")
    {
        CHECK(l1_norm(x.span(), d) == doctest::Approx(0.5));
        CHECK(linf_norm(x.span()) == doctest::Approx(0.995));
        CHECK(lq_norm(Field(100, 2.0).span(), 3.0, d) == doctest::Approx(2.0));
        CHECK(norm(x, {NormKind::Linf}, d) == linf_norm(x.span()));
        CHECK(mean(x.span(), d) == doctest::Approx(0.5));
        CHECK_THROWS_AS(lq_norm(x.span(), 0.5, d), InvalidArgument);
        const double a = lq_norm(x.span(), 4.0, d), b = grad_lq_norm(x.span(), 4.0, d);
        CHECK(w1q_norm(x.span(), 4.0, d) == doctest::Approx(std::pow(std::pow(a, 4) + std::pow(b, 4), 0.25)));
    }
    SUBCASE("triangle inequality and homogeneity")
    {
        std::mt19937_64 rng(17);
        const BoxDomain r = BoxDomain::rectangle(1.0, 1.0, 9, 7);
        const Norm kinds[] = {{NormKind::L1}, {NormKind::Lq, 3.0}, {NormKind::Linf},
                              {NormKind::GradLq, 4.0}, {NormKind::W1q, 4.0}};
        for (int k = 0; k < 20; ++k) {
            const Field f = random_field(r.size(), rng, -1.0, 1.0);
            const Field g = random_field(r.size(), rng, -1.0, 1.0);
            Field sum(r.size());
            Field scaled(r.size());
            for (std::size_t i = 0; i < r.size(); ++i) {
                sum[i] = f[i] + g[i];
                scaled[i] = -3.0 * f[i];
            }
            for (const Norm& n : kinds) {
                CHECK(norm(sum, n, r) <= norm(f, n, r) + norm(g, n, r) + 1e-12);
                CHECK(norm(scaled, n, r) == doctest::Approx(3.0 * norm(f, n, r)).epsilon(1e-12));
            }
        }
    }
}
