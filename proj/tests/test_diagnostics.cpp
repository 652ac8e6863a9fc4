#include "granuloma/diagnostics.hpp"
#include "granuloma/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace granuloma;

namespace {

std::vector<SeriesPoint> series(double C, double rate, int n, double dt = 0.5)
{
    std::vector<SeriesPoint> s;
    for (int i = 0; i < n; ++i) s.push_back({i * dt, C * std::exp(-rate * i * dt)});
    return s;
}

Trajectory equilibrium_rows(int n, double beta = 2.0)
{
    Trajectory t;
    for (int i = 0; i < n; ++i) {
        DiagnosticsRow r;
        r.t = 0.5 * i;
        r.l1_mass = beta;
        t.push_back(r);
    }
    return t;
}

Trajectory decaying_rows(double rate, double t_end, double dt = 0.5)
{
    Trajectory traj;
    for (double t = 0.0; t <= t_end + 1e-9; t += dt) {
        DiagnosticsRow r;
        r.t = t;
        const double e = std::exp(-rate * t);
        r.linf_u_minus_beta = 0.1 * e;
        r.w1q_v = 0.2 * e;
        r.w1q_w = 0.3 * e;
        r.linf_z = 0.4 * e;
        r.linf_vw = 1e-3 * e;
        r.lp_z = 0.4 * e;
        r.l1_mass = 2.0 + e;
        traj.push_back(r);
    }
    return traj;
}

}  // namespace

TEST_CASE("rate fitting")
{
    SUBCASE("exact exponential")
    {
        const RateFit f = fit_rate(series(3.0, 0.7, 40));
        CHECK(std::abs(f.C - 3.0) < 1e-10);
        CHECK(std::abs(f.rate - 0.7) < 1e-10);
        CHECK(std::abs(f.r2 - 1.0) < 1e-10);
    }
    SUBCASE("constant series")
    {
        const RateFit f = fit_rate(series(2.0, 0.0, 40));
        CHECK(f.rate == 0.0);
        CHECK(f.C == doctest::Approx(2.0));
    }
    SUBCASE("noisy exponential")
    {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        auto s = series(5.0, 0.3, 200, 0.25);
        for (auto& p : s) p.value *= 1.0 + 0.01 * u(rng);
        CHECK(std::abs(fit_rate(s).rate - 0.3) < 0.01);
    }
    SUBCASE("no exponential regime")
    {
        CHECK_THROWS_AS(fit_rate(series(1.0, 0.1, 15)), NoExponentialRegime);
        auto s = series(1.0, 0.1, 40);
        s.back().value = 0.0;
        CHECK_THROWS_AS(fit_rate(s), NoExponentialRegime);
        CHECK_THROWS_AS(fit_rate(series(1.0, 0.1, 40), 0.0), InvalidArgument);
    }
}

TEST_CASE("mass check")
{
    Trajectory eq = equilibrium_rows(10);
    const CheckReport ok = check_mass(eq, 4.0);
    CHECK(ok.pass);
    CHECK(ok.margin == doctest::Approx(0.5));
    eq[4].l1_mass = 5.0;
    const CheckReport bad = check_mass(eq, 4.0);
    CHECK_FALSE(bad.pass);
    CHECK(bad.margin < 0.0);
    CHECK(bad.t_worst == 2.0);
}

TEST_CASE("envelope checks")
{
    const double pi2 = std::numbers::pi * std::numbers::pi;
    ModelParams p;
    const StabilityWindow w{0.45, 0.045, 0.0405, pi2};
    EnvelopeInputs in;
    in.alpha = 0.0;
    const EnvelopeConstants c = envelope_constants(p, w, in);

    SUBCASE("zero fields pass")
    {
        const Trajectory eq = equilibrium_rows(20);
        const CheckReport vw = check_vw_envelope(eq, w, c, 1e-3);
        CHECK(vw.pass);
        CHECK(vw.margin == kMarginCap);
        const CheckReport u = check_u_envelope(eq, c, w, 0.0);
        CHECK(u.pass);
        CHECK(u.notes.find("non-rigorous constants") != std::string::npos);
    }
    SUBCASE("alpha = 0 envelope at t = 0")
    {
        Trajectory t = equilibrium_rows(1);
        t[0].linf_u_minus_beta = 0.0;
        CHECK(check_u_envelope(t, c, w, 0.05).pass);
        t[0].linf_u_minus_beta = 1.0;
        CHECK(envelope_g(0.0, c, w, 0.05) == doctest::Approx(c.c_K * 0.05 + c.eta));
        CHECK(check_u_envelope(t, c, w, 0.05).pass == (1.0 <= 1.01 * envelope_g(0.0, c, w, 0.05)));
    }
    SUBCASE("an envelope violation fails")
    {
        Trajectory t = decaying_rows(0.0, 10.0);
        for (auto& r : t) r.linf_vw = 1.0;
        EnvelopeConstants now = c;
        now.t_star = 0.0;
        const CheckReport r = check_vw_envelope(t, w, now, 1e-3);
        CHECK_FALSE(r.pass);
        CHECK(r.margin < 0.0);
    }
    SUBCASE("looser gamma never turns a pass into a fail")
    {
        const Trajectory t = decaying_rows(0.05, 100.0);
        for (double g : {0.04, 0.03, 0.02, 0.01, 0.005}) {
            StabilityWindow loose = w;
            loose.gamma = g;
            EnvelopeConstants lc = c;
            lc.t_star = waiting_time(p, w.xi, w.delta, g, 0.0, c.c_K, c.eta);
            const bool tight = check_vw_envelope(t, w, c, 1e-3).pass;
            if (tight) CHECK(check_vw_envelope(t, loose, lc, 1e-3).pass);
        }
    }
}

TEST_CASE("theorem decay check")
{
    const double gamma = 0.0405;
    CHECK(check_theorem_decay(decaying_rows(2 * gamma, 40 / gamma), gamma).pass);
    const CheckReport slow = check_theorem_decay(decaying_rows(0.5 * gamma, 40 / gamma), gamma);
    CHECK_FALSE(slow.pass);
    CHECK(slow.margin < 0.0);
    const CheckReport grow = check_theorem_decay(decaying_rows(-0.1, 50.0), gamma);
    CHECK_FALSE(grow.pass);
    CHECK(grow.notes.find("t_end below 40/gamma") != std::string::npos);
    const CheckReport none = check_theorem_decay(equilibrium_rows(30), gamma);
    CHECK_FALSE(none.pass);
    CHECK(none.notes.find("no exponential regime") != std::string::npos);
}

TEST_CASE("z suppression")
{
    TestFunctionParams tp;
    tp.p = 5.0;
    tp.ell = 2.0;
    tp.w_star = 0.05;
    const StabilityWindow w{0.45, 0.045, 0.0405, 9.8};

    SUBCASE("z = 0")
    {
        const CheckReport r = check_z_suppression(equilibrium_rows(20), tp, w);
        CHECK(r.pass);
        CHECK_FALSE(r.indeterminate);
    }
    SUBCASE("decaying z")
    {
        Trajectory t = decaying_rows(0.1, 50.0);
        for (auto& r : t) r.zp_phi = r.lp_z;
        CHECK(check_z_suppression(t, tp, w).pass);
        t[60].lp_z = 10.0;
        CHECK_FALSE(check_z_suppression(t, tp, w).pass);
    }
    SUBCASE("never small enough")
    {
        Trajectory t = decaying_rows(0.1, 10.0);
        for (auto& r : t) r.linf_vw = 1.0;
        const CheckReport r = check_z_suppression(t, tp, w);
        CHECK(r.indeterminate);
        CHECK_FALSE(r.pass);
    }
}

TEST_CASE("diagnostics CSV round trip")
{
    Trajectory t = decaying_rows(0.3, 5.0);
    t[2].zp_phi = 1.0 / 3.0;
    std::ostringstream os;
    write_diagnostics_csv(os, t);
    CHECK(os.str().rfind(std::string(kDiagnosticsHeader) + "\n", 0) == 0);
    std::istringstream is(os.str());
    CHECK(read_diagnostics_csv(is) == t);
}

TEST_CASE("reports are deterministic")
{
    const Trajectory t = decaying_rows(0.1, 50.0);
    const auto a = to_json_line(check_theorem_decay(t, 0.0405));
    const auto b = to_json_line(check_theorem_decay(t, 0.0405));
    CHECK(a == b);
    CHECK(a.find("\"check\":\"theorem_decay\"") != std::string::npos);
}

TEST_CASE("rows from a state")
{
    const BoxDomain d = BoxDomain::line(1.0, 8);
    SimState s;
    s.u = Field(8, 2.0);
    s.v = Field(8, 0.0);
    s.w = Field(8, 0.0);
    s.z = Field(8, 0.0);
    DiagnosticsSpec spec;
    spec.tp.p = 5.0;
    spec.tp.ell = 2.0;
    spec.tp.w_star = 0.05;
    const DiagnosticsRow r = compute_row(s, d, spec);
    CHECK(r.linf_u_minus_beta == 0.0);
    CHECK(r.l1_mass == doctest::Approx(2.0));
    CHECK(r.four_norm_sum() == 0.0);
    REQUIRE(r.zp_phi);
    CHECK(*r.zp_phi == 0.0);
    s.w[0] = 0.1;
    CHECK_FALSE(compute_row(s, d, spec).zp_phi);
}
