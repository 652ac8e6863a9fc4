#include "granuloma/scenario.hpp"

#include "granuloma/error.hpp"
#include "granuloma/format.hpp"
#include "granuloma/semigroup.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <limits>
#include <thread>

namespace granuloma {

namespace fs = std::filesystem;

std::string to_string(Regime r)
{
    switch (r) {
    case Regime::Subcritical: return "subcritical";
    case Regime::Supercritical: return "supercritical";
    case Regime::NotApplicable: return "not-applicable";
    }
    return "not-applicable";
}

Regime classify(const ModelParams& p)
{
    if (!(p.beta > 1.0)) return Regime::NotApplicable;
    return reproduction_number(p) < 1.0 ? Regime::Subcritical : Regime::Supercritical;
}

std::array<std::pair<double, double>, 4> k_hat_exponents(double q)
{
    const double inf = std::numeric_limits<double>::infinity();
    return {{{inf, q}, {q, q}, {q, q}, {inf, q}}};
}

std::array<double, 4> estimate_k_hat(const BoxDomain& d, double q, int samples, std::uint64_t seed)
{
    BoxDomain coarse = d;
    for (int a = 0; a < d.dim; ++a) coarse.cells[a] = std::min(d.cells[a], 128);
    const auto exps = k_hat_exponents(q);
    std::array<double, 4> k{};
    for (int kind = 1; kind <= 4; ++kind) {
        k[kind - 1] = estimate_constant(kind, exps[kind - 1].first, exps[kind - 1].second, coarse, samples,
                                        seed + static_cast<std::uint64_t>(kind))
                          .value;
    }
    return k;
}

DiagnosticsSpec ResolvedRun::diagnostics() const
{
    DiagnosticsSpec s;
    s.beta = config.model.beta;
    s.q = config.model.q;
    s.xi = xi;
    s.tp = tp;
    return s;
}

namespace {

void check_runnable(const RunConfig& c)
{
    c.model.validate();
    c.grid.validate();
    c.step.validate();
    if (c.model.n != c.grid.dim) {
        throw InvalidArgument("model.n must equal grid.dim for simulation (constants mode allows n >= 3)");
    }
}

}  // namespace

ResolvedRun resolve(const RunConfig& c, bool with_constants)
{
    c.model.validate();
    c.grid.validate();
    if (!(c.eta > 0.0)) throw InvalidArgument("envelope.eta must be > 0");
    if (!(c.envelope_tolerance >= 0.0)) throw InvalidArgument("envelope.tolerance must be >= 0");
    if (c.semigroup_samples < 1) throw InvalidArgument("semigroup.samples must be >= 1");

    ResolvedRun r;
    r.config = c;
    r.lambda = neumann_lambda(c.grid);
    r.r0 = reproduction_number(c.model);
    r.regime = classify(c.model);

    if (r.regime == Regime::Subcritical) {
        r.window = default_window(c.model, r.lambda, c.xi, c.delta, c.gamma, c.gamma_fraction);
        r.xi = r.window->xi;
        r.check_gamma = r.window->gamma;
    } else {
        r.window_note = r.regime == Regime::Supercritical
                            ? "no admissible window: R0 >= 1"
                            : "no admissible window: beta > 1 required";
        // Diagnostics still need some xi; use the override or 1/2.
        r.xi = c.xi.value_or(0.5);
        r.check_gamma = c.gamma.value_or(0.0);
    }
    r.tp = make_test_function_params(c.model, r.xi, c.tf_p, c.tf_ell, c.tf_w_star);

    const std::size_t cells = c.grid.size();
    if (c.model.n == c.grid.dim) {
        r.initial = build_initial_state(c.initial, c.grid, c.model);
        double a = 0.0;
        for (double x : r.initial.u.values) a = std::max(a, std::abs(x - c.model.beta));
        r.alpha = a;
        r.grad_v0_q = grad_lq_norm(r.initial.v.span(), c.model.q, c.grid);
        r.vw0 = linf_norm(combined_vw(r.initial, r.xi).span());
        std::vector<double> uwz(cells);
        for (std::size_t i = 0; i < cells; ++i) {
            uwz[i] = r.initial.u.values[i] + r.initial.w.values[i] + r.initial.z.values[i];
        }
        r.m_star = l1_norm(uwz, c.grid) + c.model.beta * c.grid.volume();
    }

    if (c.k_hat) {
        r.k_hat = *c.k_hat;
        r.k_source = "config";
    } else if (with_constants) {
        r.k_hat = estimate_k_hat(c.grid, c.model.q, c.semigroup_samples, c.seed);
        r.k_source = "estimated";
    } else {
        r.k_source = "unset";
    }

    if (with_constants && r.window) {
        EnvelopeInputs in;
        in.alpha = r.alpha;
        in.eta = c.eta;
        in.grad_v0_q = r.grad_v0_q;
        in.k_hat = r.k_hat;
        in.k_hat_rigorous = c.k_hat && c.k_hat_rigorous;
        in.domain_volume = c.grid.volume();
        in.w_star = r.tp.w_star;
        r.constants = envelope_constants(c.model, *r.window, in);
    }
    return r;
}

std::vector<CheckReport> run_checks(const ResolvedRun& r, const Trajectory& traj)
{
    std::vector<CheckReport> out;
    out.push_back(check_mass(traj, r.m_star));
    const double tol = r.config.envelope_tolerance;
    if (r.window && r.constants) {
        out.push_back(check_vw_envelope(traj, *r.window, *r.constants, r.vw0, tol));
        out.push_back(check_u_envelope(traj, *r.constants, *r.window, r.grad_v0_q, tol));
    }
    out.push_back(check_theorem_decay(traj, r.check_gamma));
    if (r.window) out.push_back(check_z_suppression(traj, r.tp, *r.window));
    return out;
}

namespace {

nlohmann::ordered_json constants_json(const EnvelopeConstants& c)
{
    nlohmann::ordered_json j;
    j["alpha"] = c.alpha;
    j["eta"] = c.eta;
    j["k_hat"] = c.k_hat;
    j["c_K"] = c.c_K;
    j["t_star"] = c.t_star;
    j["M"] = c.M;
    j["M_tilde"] = c.M_tilde;
    j["S1"] = c.S1;
    j["S2"] = c.S2;
    j["S3"] = c.S3;
    j["C1"] = c.C1;
    j["C2"] = c.C2;
    j["D"] = c.D;
    j["eps1"] = c.eps1;
    j["eps2"] = c.eps2;
    j["zeta"] = c.zeta;
    j["rigorous"] = c.rigorous;
    return j;
}

}  // namespace

std::string manifest_json(const SimulationOutput& out)
{
    const ResolvedRun& r = out.setup;
    nlohmann::ordered_json j;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    {
        std::istringstream lines(config_to_string(r.config));
        std::string line;
        while (std::getline(lines, line)) {
            const auto eq = line.find(" = ");
            cfg[line.substr(0, eq)] = line.substr(eq + 3);
        }
    }
    j["config"] = cfg;
    j["R0"] = r.r0;
    j["regime"] = to_string(r.regime);
    j["lambda"] = r.lambda;
    if (r.window) {
        j["window"] = {{"xi", r.window->xi}, {"delta", r.window->delta}, {"gamma", r.window->gamma}};
    } else {
        j["window"] = nullptr;
        j["window_note"] = r.window_note;
    }
    j["test_function"] = {{"p", r.tp.p},         {"ell", r.tp.ell},     {"w_star", r.tp.w_star},
                          {"b0", r.tp.b0},       {"kappa", r.tp.kappa}, {"zeta", r.tp.zeta}};
    j["k_hat_source"] = r.k_source;
    j["constants"] = r.constants ? constants_json(*r.constants) : nlohmann::ordered_json(nullptr);
    if (r.constants && !r.constants->rigorous) j["constants_note"] = "non-rigorous constants";
    j["initial"] = {{"alpha", r.alpha}, {"grad_v0_q", r.grad_v0_q}, {"vw0", r.vw0}, {"m_star", r.m_star}};
    j["termination"] = to_string(out.result.termination);
    j["message"] = out.result.message;
    j["dt"] = {{"steps", out.result.dt.steps},
               {"min", out.result.dt.dt_min},
               {"max", out.result.dt.dt_max},
               {"mean", out.result.dt.dt_mean}};
    j["rows"] = out.result.rows.size();
    j["t_final"] = out.result.rows.empty() ? 0.0 : out.result.rows.back().t;
    return j.dump(2) + "\n";
}

SimulationOutput simulate(const RunConfig& c, const std::string& dir, bool with_constants)
{
    check_runnable(c);
    SimulationOutput out;
    out.setup = resolve(c, with_constants);

    RunOptions opts;
    opts.diagnostics = out.setup.diagnostics();
    fs::path snap_dir;
    if (!dir.empty()) {
        fs::create_directories(dir);
        if (c.snapshots) {
            snap_dir = fs::path(dir) / "snapshots";
            fs::create_directories(snap_dir);
            int index = 0;
            opts.on_output = [&](const SimState& s) {
                char suffix[32];
                std::snprintf(suffix, sizeof suffix, "_%06d.csv", index++);
                const std::pair<const char*, const Field*> fields[] = {
                    {"u", &s.u}, {"v", &s.v}, {"w", &s.w}, {"z", &s.z}};
                for (const auto& [name, f] : fields) {
                    write_snapshot_csv((snap_dir / (std::string(name) + suffix)).string(), *f, c.grid);
                }
            };
        }
    }
    out.result = run(out.setup.initial, c.grid, c.model, c.step, opts);
    out.checks = run_checks(out.setup, out.result.rows);

    if (!dir.empty()) {
        const fs::path base(dir);
        write_diagnostics_csv((base / "diagnostics.csv").string(), out.result.rows);
        write_reports((base / "checks.jsonl").string(), out.checks);
        std::ofstream m(base / "run_manifest.json");
        if (!m) throw Error("cannot write run manifest in '" + dir + "'");
        m << manifest_json(out);
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> constants_report(const RunConfig& c,
                                                                 std::optional<int> estimate_samples)
{
    RunConfig cfg = c;
    if (estimate_samples) {
        cfg.k_hat.reset();
        cfg.semigroup_samples = *estimate_samples;
    }
    std::vector<std::pair<std::string, std::string>> out;
    auto add = [&](const std::string& k, const std::string& v) { out.emplace_back(k, v); };
    auto addr = [&](const std::string& k, double v) { add(k, fmt17(v)); };

    cfg.model.validate();
    const double r0 = reproduction_number(cfg.model);
    const Regime regime = classify(cfg.model);
    addr("beta", cfg.model.beta);
    addr("mu", cfg.model.mu);
    add("f", to_string(cfg.model.f_kind));
    add("n", std::to_string(cfg.model.n));
    addr("q", cfg.model.q);
    addr("R0", r0);
    add("verdict", to_string(regime));
    if (auto iv = xi_interval(cfg.model)) {
        addr("xi_interval.lo", iv->first);
        addr("xi_interval.hi", iv->second);
    } else {
        add("xi_interval", "empty");
    }

    const ResolvedRun r = resolve(cfg, true);
    addr("lambda", r.lambda);
    if (r.window) {
        addr("xi", r.window->xi);
        addr("delta", r.window->delta);
        addr("gamma", r.window->gamma);
        addr("gamma_sup", gamma_sup(cfg.model, r.window->xi, r.window->delta, r.lambda));
    } else {
        add("window", r.window_note);
    }
    addr("p", r.tp.p);
    addr("ell", r.tp.ell);
    addr("w_star", r.tp.w_star);
    addr("b0", r.tp.b0);
    addr("kappa", r.tp.kappa);
    for (int i = 0; i < 4; ++i) addr("k" + std::to_string(i + 1), r.k_hat[i]);
    add("k_source", r.k_source);
    if (r.k_source == "estimated") {
        add("k_samples", std::to_string(cfg.semigroup_samples));
        add("k_seed", std::to_string(cfg.seed));
    }
    addr("alpha", r.alpha);
    addr("grad_v0_q", r.grad_v0_q);
    if (r.constants) {
        const EnvelopeConstants& k = *r.constants;
        addr("eta", k.eta);
        addr("t_star", k.t_star);
        addr("S1", k.S1);
        addr("S2", k.S2);
        addr("S3", k.S3);
        addr("c_K", k.c_K);
        addr("M", k.M);
        addr("M_tilde", k.M_tilde);
        addr("C1", k.C1);
        addr("C2", k.C2);
        addr("D", k.D);
        addr("eps1", k.eps1);
        addr("eps2", k.eps2);
        addr("zeta", k.zeta);
        add("rigorous", k.rigorous ? "true" : "false");
        if (!k.rigorous) add("note", "non-rigorous constants");
    } else {
        addr("zeta", r.tp.zeta);
    }
    return out;
}

std::string sweep_axis_key(const std::string& axis)
{
    if (axis == "beta") return "model.beta";
    if (axis == "mu") return "model.mu";
    if (axis == "epsilon") return "initial.epsilon";
    const auto keys = config_keys();
    if (std::find(keys.begin(), keys.end(), axis) == keys.end()) {
        throw ConfigError("unknown sweep axis '" + axis + "'");
    }
    return axis;
}

namespace {

SweepPoint run_point(const RunConfig& base, const std::string& key, double value, const std::string& dir)
{
    SweepPoint pt;
    pt.value = value;
    try {
        RunConfig c = base;
        set_config_value(c, key, fmt17(value));
        pt.r0 = reproduction_number(c.model);
        const SimulationOutput out = simulate(c, dir, false);
        pt.termination = to_string(out.result.termination);
        try {
            pt.fit = fit_rate(column(out.result.rows, &DiagnosticsRow::linf_vw));
        } catch (const NoExponentialRegime& e) {
            pt.error = e.what();
        }
        const CheckReport decay = check_theorem_decay(out.result.rows, out.setup.check_gamma);
        pt.decay_pass = decay.pass && out.result.termination == Termination::Completed;
    } catch (const std::exception& e) {
        pt.termination = "error";
        pt.error = e.what();
    }
    return pt;
}

}  // namespace

std::vector<SweepPoint> sweep(const RunConfig& base, const std::string& axis, double from, double to,
                              int points, const std::string& dir)
{
    if (points < 1) throw InvalidArgument("sweep needs at least one point");
    const std::string key = sweep_axis_key(axis);
    std::vector<double> values(points);
    for (int i = 0; i < points; ++i) {
        values[i] = points == 1 ? from : from + (to - from) * i / (points - 1);
    }
    std::vector<SweepPoint> out(points);
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::size_t next = 0;
    while (next < values.size()) {
        std::vector<std::future<SweepPoint>> batch;
        const std::size_t first = next;
        for (unsigned k = 0; k < workers && next < values.size(); ++k, ++next) {
            std::string point_dir;
            if (!dir.empty()) {
                char name[32];
                std::snprintf(name, sizeof name, "point_%03zu", next);
                point_dir = (fs::path(dir) / name).string();
            }
            batch.push_back(std::async(std::launch::async, run_point, std::cref(base), std::cref(key),
                                       values[next], point_dir));
        }
        for (std::size_t k = 0; k < batch.size(); ++k) out[first + k] = batch[k].get();
    }
    return out;
}

void write_sweep_csv(const std::string& path, const std::string& axis, const std::vector<SweepPoint>& pts)
{
    std::ofstream os(path);
    if (!os) throw Error("cannot write '" + path + "'");
    os << axis << ",R0,termination,rate_linf_vw,r2,decay_pass,error\n";
    for (const auto& p : pts) {
        os << fmt17(p.value) << ',' << fmt17(p.r0) << ',' << p.termination << ',';
        if (p.fit) {
            os << fmt17(p.fit->rate) << ',' << fmt17(p.fit->r2);
        } else {
            os << ',';
        }
        std::string err = p.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        os << ',' << (p.decay_pass ? "true" : "false") << ',' << err << '\n';
    }
}

BisectResult bisect_epsilon(const RunConfig& base, double lo, double hi, double rel_width)
{
    if (!(lo > 0.0 && hi > lo)) throw InvalidArgument("bisection needs 0 < from < to");
    if (!(rel_width > 0.0)) throw InvalidArgument("relative width must be > 0");
    BisectResult b;
    const std::string key = "initial.epsilon";
    auto probe = [&](double eps) {
        b.probes.push_back(run_point(base, key, eps, ""));
        return b.probes.back().decay_pass;
    };
    try {
        const ResolvedRun r = resolve(base, true);
        if (r.constants) b.eps2 = r.constants->eps2;
    } catch (const std::exception&) {
        // The threshold is reported only when it can be computed.
    }
    const bool lo_pass = probe(lo);
    const bool hi_pass = probe(hi);
    b.lo = lo;
    b.hi = hi;
    if (!lo_pass || hi_pass) return b;
    b.bracketed = true;
    while (b.hi / b.lo - 1.0 > rel_width) {
        const double mid = std::sqrt(b.lo * b.hi);
        if (probe(mid)) {
            b.lo = mid;
        } else {
            b.hi = mid;
        }
    }
    return b;
}

}  // namespace granuloma
