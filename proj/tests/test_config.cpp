#include "granuloma/config.hpp"
#include "granuloma/error.hpp"
#include "granuloma/scenario.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace granuloma;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / "granuloma_tests" / name;
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::map<std::string, std::string> report_map(const RunConfig& c)
{
    std::map<std::string, std::string> m;
    for (const auto& [k, v] : constants_report(c)) m[k] = v;
    return m;
}

RunConfig small_config()
{
    RunConfig c;
    c.grid = BoxDomain::line(1.0, 32);
    c.step.t_end = 1.0;
    c.step.output_interval = 0.25;
    c.k_hat = std::array<double, 4>{1.0, 1.0, 1.0, 1.0};
    return c;
}

}  // namespace

TEST_CASE("config round trip")
{
    RunConfig c;
    c.model.beta = 3.0 / 7.0 + 1.0;
    c.model.mu = 0.1;
    c.model.f_kind = Kinetics::Saturating;
    c.grid = BoxDomain::rectangle(1.5, 2.0, 24, 32);
    c.model.n = 2;
    c.xi = 0.3333333333333333;
    c.gamma = 0.01;
    c.k_hat = std::array<double, 4>{1.5, 2.0, 0.7, 3.25};
    c.tf_p = 6.0;
    c.initial.v = FieldInit{InitKind::Noise, 0.0, 0.5, {0.25, 0.75}, 0.2, 5, 77};
    c.initial.epsilon = 1e-4;
    c.output_dir = "runs/a b";
    c.snapshots = true;
    c.seed = 123456789012345ULL;
    const std::string text = config_to_string(c);
    const RunConfig back = parse_config_string(text);
    CHECK(back == c);
    CHECK(config_to_string(back) == text);
    CHECK(parse_config_string(config_to_string(RunConfig{})) == RunConfig{});
}

TEST_CASE("config parsing")
{
    SUBCASE("comments, blanks and partial files")
    {
        const RunConfig c = parse_config_string("# comment\n\nmodel.mu = 0.25\n  grid.cells.x=64  \n");
        CHECK(c.model.mu == 0.25);
        CHECK(c.grid.cells[0] == 64);
        CHECK(c.model.beta == RunConfig{}.model.beta);
    }
    SUBCASE("unknown key names the key and the line")
    {
        try {
            parse_config_string("model.beta = 2\nmodel.bta = 3\n");
            FAIL("expected a ConfigError");
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("line 2") != std::string::npos);
            CHECK(msg.find("model.bta") != std::string::npos);
        }
    }
    SUBCASE("other errors")
    {
        CHECK_THROWS_AS(parse_config_string("model.beta 2\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_string("model.beta = two\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_string("model.beta = 2\nmodel.beta = 3\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_string("initial.u.kind = wobble\n"), ConfigError);
        CHECK_THROWS_AS(load_config("/nonexistent/granuloma.cfg"), Error);
    }
    SUBCASE("set_config_value and key list")
    {
        RunConfig c;
        set_config_value(c, "initial.epsilon", "0.5");
        CHECK(c.initial.epsilon == 0.5);
        CHECK_THROWS_AS(set_config_value(c, "nope", "1"), ConfigError);
        const auto keys = config_keys();
        CHECK(std::find(keys.begin(), keys.end(), "model.beta") != keys.end());
        CHECK(std::find(keys.begin(), keys.end(), "initial.z.seed") != keys.end());
    }
}

TEST_CASE("initial conditions")
{
    const BoxDomain d = BoxDomain::rectangle(1.0, 1.0, 16, 16);
    ModelParams p;
    InitialConditionSpec ic;
    ic.u = FieldInit{InitKind::Noise, 0.0, 5.0, {0.5, 0.5}, 0.1, 6, 3};
    ic.v = FieldInit{InitKind::Noise, 0.0, 1.0, {0.5, 0.5}, 0.1, 6, 4};
    ic.epsilon = 0.1;
    const SimState s = build_initial_state(ic, d, p);
    for (const Field* f : {&s.u, &s.v, &s.w, &s.z}) {
        REQUIRE(f->size() == d.size());
        for (double x : f->values) CHECK(x >= 0.0);
    }
    CHECK(linf_norm(s.v.span()) <= 0.1 + 1e-15);
    // Bump peak sits at the center cell closest to (0.5, 0.5), scaled by epsilon.
    CHECK(linf_norm(s.w.span()) <= 0.1);
    CHECK(linf_norm(s.w.span()) > 0.09);

    ic = InitialConditionSpec{};
    const SimState eq = build_initial_state(ic, BoxDomain::line(1.0, 8), p);
    for (double x : eq.u.values) CHECK(x == 2.0);
}

TEST_CASE("snapshot format")
{
    const fs::path dir = scratch("snap");
    fs::create_directories(dir);
    const BoxDomain d = BoxDomain::rectangle(3.0, 3.0, 3, 3);
    write_snapshot_csv((dir / "s.csv").string(), Field(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9}), d);
    const std::string text = slurp(dir / "s.csv");
    CHECK(text.rfind("x,y,value\n0.5,0.5,1\n1.5,0.5,2\n2.5,0.5,3\n0.5,1.5,4\n", 0) == 0);
    const BoxDomain line = BoxDomain::line(3.0, 3);
    write_snapshot_csv((dir / "l.csv").string(), Field(std::vector<double>{0.25, 0, 1}), line);
    CHECK(slurp(dir / "l.csv") == "x,value\n0.5,0.25\n1.5,0\n2.5,1\n");
}

TEST_CASE("regime and constants report")
{
    ModelParams p;
    CHECK(classify(p) == Regime::Subcritical);
    p.mu = 2.0;
    CHECK(classify(p) == Regime::Supercritical);
    p.beta = 1.0;
    p.mu = 0.1;
    CHECK(classify(p) == Regime::NotApplicable);

    RunConfig c = small_config();
    auto m = report_map(c);
    CHECK(m["R0"] == "0.90000000000000002");
    CHECK(m["verdict"] == "subcritical");
    CHECK(m["xi_interval.lo"] == "0.40000000000000002");
    CHECK(m["xi_interval.hi"] == "0.5");
    CHECK(m["note"] == "non-rigorous constants");
    for (const char* key : {"lambda", "t_star", "S1", "S2", "S3", "c_K", "C1", "C2", "D", "eps1", "eps2", "zeta",
                            "b0", "kappa", "gamma"}) {
        CHECK(m.count(key) == 1);
    }

    c.model.mu = 2.0;
    m = report_map(c);
    CHECK(m["R0"] == "2.5");
    CHECK(m["verdict"] == "supercritical");
    CHECK(m["window"].find("no admissible window") != std::string::npos);

    c.model.beta = 1.0;
    c.model.mu = 0.1;
    m = report_map(c);
    CHECK(m["verdict"] == "not-applicable");
}

TEST_CASE("estimated constants are labelled")
{
    RunConfig c = small_config();
    c.k_hat.reset();
    c.semigroup_samples = 1;
    const auto m = [&] {
        std::map<std::string, std::string> out;
        for (const auto& [k, v] : constants_report(c)) out[k] = v;
        return out;
    }();
    CHECK(m.at("k_source") == "estimated");
    CHECK(m.at("k_samples") == "1");
    CHECK(m.at("rigorous") == "false");
}

TEST_CASE("simulate")
{
    SUBCASE("equilibrium rows all equal row 0, directories are created")
    {
        const fs::path dir = scratch("eq") / "nested" / "out";
        RunConfig c = small_config();
        c.initial.epsilon = 0.0;
        c.snapshots = true;
        const SimulationOutput out = simulate(c, dir.string());
        REQUIRE(out.result.rows.size() == 5);
        for (const auto& r : out.result.rows) {
            DiagnosticsRow same = r;
            same.t = 0.0;
            CHECK(same == out.result.rows[0]);
        }
        CHECK(fs::exists(dir / "diagnostics.csv"));
        CHECK(fs::exists(dir / "checks.jsonl"));
        CHECK(fs::exists(dir / "run_manifest.json"));
        CHECK(fs::exists(dir / "snapshots" / "u_000000.csv"));
        CHECK(fs::exists(dir / "snapshots" / "z_000004.csv"));
        const std::string manifest = slurp(dir / "run_manifest.json");
        CHECK(manifest.find("\"termination\"") != std::string::npos);
    }
    SUBCASE("identical config and seed give identical bytes")
    {
        RunConfig c = small_config();
        c.initial.u = FieldInit{InitKind::Noise, 0.0, 0.5, {0.5, 0.5}, 0.1, 6, 11};
        c.snapshots = true;
        const fs::path a = scratch("det_a"), b = scratch("det_b");
        simulate(c, a.string());
        simulate(c, b.string());
        for (const char* f : {"diagnostics.csv", "checks.jsonl", "run_manifest.json", "snapshots/v_000002.csv"}) {
            CHECK(slurp(a / f) == slurp(b / f));
        }
    }
    SUBCASE("dimension mismatch is rejected")
    {
        RunConfig c = small_config();
        c.model.n = 2;
        CHECK_THROWS_AS(simulate(c, ""), InvalidArgument);
    }
}

TEST_CASE("sweep")
{
    RunConfig c = small_config();
    c.step.t_end = 10.0;
    c.step.output_interval = 0.5;

    SUBCASE("single point equals simulate plus fit")
    {
        const auto pts = sweep(c, "mu", 0.3, 0.3, 1);
        REQUIRE(pts.size() == 1);
        RunConfig d = c;
        d.model.mu = 0.3;
        const SimulationOutput out = simulate(d, "", false);
        const RateFit f = fit_rate(column(out.result.rows, &DiagnosticsRow::linf_vw));
        REQUIRE(pts[0].fit);
        CHECK(pts[0].fit->rate == f.rate);
        CHECK(pts[0].r0 == reproduction_number(d.model));
        CHECK(pts[0].termination == "completed");
    }
    SUBCASE("failures are recorded per point")
    {
        const auto pts = sweep(c, "beta", -1.0, 2.0, 2);
        REQUIRE(pts.size() == 2);
        CHECK(pts[0].termination == "error");
        CHECK_FALSE(pts[0].error.empty());
        CHECK(pts[1].termination == "completed");
    }
    SUBCASE("axes")
    {
        CHECK(sweep_axis_key("epsilon") == "initial.epsilon");
        CHECK(sweep_axis_key("step.cfl_safety") == "step.cfl_safety");
        CHECK_THROWS_AS(sweep_axis_key("gamma"), ConfigError);
    }
}
