#include "granuloma/error.hpp"
#include "granuloma/functionals.hpp"

#include <doctest.h>

#include <cmath>

using namespace granuloma;

namespace {

TestFunctionParams params(double p, double ell, double ws)
{
    TestFunctionParams tp;
    tp.p = p;
    tp.ell = ell;
    tp.w_star = ws;
    return tp;
}

}  // namespace

TEST_CASE("weight function")
{
    const TestFunctionParams tp = params(2.0, 0.5, 0.1);
    CHECK(phi(0.0, tp) == doctest::Approx(std::pow(0.2, -0.5)).epsilon(1e-15));
    CHECK(phi(0.1, tp) == doctest::Approx(std::pow(0.1, -0.5)).epsilon(1e-15));
    CHECK(phi(0.05, tp) == doctest::Approx(2.581988897471611).epsilon(1e-12));
    CHECK(phi_prime(0.05, tp) == doctest::Approx(0.5 * std::pow(0.15, -1.5)).epsilon(1e-14));
    CHECK(phi_second(0.05, tp) == doctest::Approx(0.75 * std::pow(0.15, -2.5)).epsilon(1e-14));
}

TEST_CASE("kappa")
{
    const double k = kappa(2.0, 0.5, 0.1);
    CHECK(k == doctest::Approx(2.0 * std::pow(0.2, -0.5) * (1.0 - 0.52 / 0.55)).epsilon(1e-12));
    CHECK(k == doctest::Approx(0.2439346884545226).epsilon(1e-14));

    SUBCASE("small w_star limit")
    {
        for (double p : {2.0, 3.0, 6.0}) {
            const double ell = 0.4 * (p - 1.0);
            const double ws = 1e-7;
            const double bracket = kappa(p, ell, ws) / (p * std::pow(2.0 * ws, -ell));
            CHECK(bracket == doctest::Approx((p - ell - 1.0) / (ell + 1.0)).epsilon(1e-5));
        }
    }
    SUBCASE("precondition")
    {
        CHECK_THROWS_AS(kappa(2.0, 0.5, 0.375), InvalidArgument);
        CHECK_THROWS_AS(kappa(2.0, 0.5, 0.3), InvalidArgument);
    }
    SUBCASE("lemma inequality holds on a dense scan")
    {
        for (const auto& tp : {params(2.0, 0.5, 0.1), params(5.0, 2.0, 0.02), params(3.0, 1.0, 0.05)}) {
            const double kp = kappa(tp);
            for (int i = 1; i < 10000; ++i) {
                const double y = tp.w_star * i / 10000.0;
                const double f = phi(y, tp), f1 = phi_prime(y, tp), f2 = phi_second(y, tp);
                const double den = f2 - tp.p * f1;
                REQUIRE(den > 0.0);
                const double b = -2.0 * tp.p * f1 + tp.p * (tp.p - 1.0) * f;
                CHECK(tp.p * (tp.p - 1.0) * f - b * b / (4.0 * den) >= kp - 1e-10);
            }
        }
    }
    SUBCASE("decreasing in w_star")
    {
        const double b0 = find_b0(2.0, 0.5);
        double prev = kappa(2.0, 0.5, b0 * 0.01);
        for (int i = 2; i < 100; ++i) {
            const double next = kappa(2.0, 0.5, b0 * 0.01 * i);
            CHECK(next < prev);
            prev = next;
        }
    }
}

TEST_CASE("b0")
{
    const double b0 = find_b0(2.0, 0.5);
    CHECK(b0 < 0.375);
    CHECK(w_star_admissible(2.0, 0.5, b0 * (1 - 1e-6)));
    CHECK_FALSE(w_star_admissible(2.0, 0.5, b0 * (1 + 1e-6)));
    CHECK(find_b0(4.0, 0.5) < find_b0(2.0, 0.5));
    double prev = 1.0;
    for (double gap : {0.5, 0.1, 0.01, 0.001}) {
        const double b = find_b0(3.0, 2.0 - gap);
        CHECK(b < prev);
        prev = b;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("default parameters")
{
    ModelParams m;
    m.n = 1;
    m.q = 4.0;
    CHECK(p_lower_bound(m) == doctest::Approx(4.0 / 3.0));
    const TestFunctionParams tp = make_test_function_params(m, 0.45);
    CHECK(tp.p == doctest::Approx(1.25 * 4.0 / 3.0));
    CHECK(tp.ell == doctest::Approx((tp.p - 1) / 2));
    CHECK(tp.w_star == doctest::Approx(tp.b0 / 2));
    CHECK(tp.kappa == doctest::Approx(kappa(tp)));
    CHECK(tp.zeta == doctest::Approx(0.45 * tp.w_star));
    CHECK_THROWS_AS(make_test_function_params(m, 0.45, 1.0), InvalidArgument);
    CHECK_THROWS_AS(make_test_function_params(m, 0.45, std::nullopt, std::nullopt, 1.0), InvalidArgument);
}

TEST_CASE("z^p functional")
{
    const BoxDomain d = BoxDomain::line(2.0, 10);
    const TestFunctionParams tp = params(3.0, 1.0, 0.05);
    SimState s;
    s.u = Field(10, 2.0);
    s.v = Field(10, 0.0);
    s.w = Field(10, 0.0);
    s.z = Field(10, 0.0);
    CHECK(zp_functional(s, tp, d) == 0.0);
    s.z = Field(10, 1.0);
    CHECK(zp_functional(s, tp, d) == doctest::Approx(2.0 * std::pow(0.1, -1.0)));
    for (std::size_t i = 0; i < 10; ++i) {
        s.z[i] = 0.1 * (i + 1);
        s.w[i] = 0.004 * i;
    }
    const double base = zp_functional(s, tp, d);
    for (double& z : s.z.values) z *= 2.0;
    CHECK(zp_functional(s, tp, d) == doctest::Approx(8.0 * base).epsilon(1e-14));
    s.w[3] = 0.2;
    CHECK_THROWS_AS(zp_functional(s, tp, d), InvalidArgument);
}

TEST_CASE("combined v + xi w")
{
    SimState s;
    s.v = Field(std::vector<double>{1.0, 2.0});
    s.w = Field(std::vector<double>{3.0, 4.0});
    const Field c = combined_vw(s, 0.5);
    CHECK(c[0] == 2.5);
    CHECK(c[1] == 4.0);
    CHECK(combined_vw(s, 0.0) == s.v);
    s.w = Field(std::vector<double>{0.0, 0.0});
    CHECK(combined_vw(s, 0.45) == s.v);
}
