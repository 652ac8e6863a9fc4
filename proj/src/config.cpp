#include "granuloma/config.hpp"

#include "granuloma/error.hpp"
#include "granuloma/format.hpp"
#include "granuloma/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace granuloma {

std::string to_string(InitKind k)
{
    switch (k) {
    case InitKind::Constant: return "constant";
    case InitKind::Bump: return "bump";
    case InitKind::Noise: return "noise";
    }
    return "constant";
}

InitKind init_kind_from_string(const std::string& s)
{
    if (s == "constant") return InitKind::Constant;
    if (s == "bump") return InitKind::Bump;
    if (s == "noise") return InitKind::Noise;
    throw InvalidArgument("unknown initial profile '" + s + "' (constant|bump|noise)");
}

namespace {

struct Entry {
    std::string key;
    std::function<std::optional<std::string>(const RunConfig&)> get;  // empty: not printed
    std::function<void(RunConfig&, const std::string&)> set;
};

bool parse_bool(const std::string& s, const std::string& what)
{
    if (s == "true") return true;
    if (s == "false") return false;
    throw InvalidArgument(what + ": expected true or false, got '" + s + "'");
}

std::uint64_t parse_seed(const std::string& s, const std::string& what)
{
    const long long v = parse_int(s, what);
    if (v < 0) throw InvalidArgument(what + ": must be >= 0");
    return static_cast<std::uint64_t>(v);
}

int parse_small_int(const std::string& s, const std::string& what)
{
    const long long v = parse_int(s, what);
    if (v < -2147483647LL || v > 2147483647LL) throw InvalidArgument(what + ": out of range");
    return static_cast<int>(v);
}

template <typename Get>
Entry real_entry(std::string key, Get member)
{
    return {key, [member](const RunConfig& c) -> std::optional<std::string> { return fmt17(member(c)); },
            [member, key](RunConfig& c, const std::string& v) { member(c) = parse_double(v, key); }};
}

template <typename Get>
Entry optional_entry(std::string key, Get member)
{
    return {key,
            [member](const RunConfig& c) -> std::optional<std::string> {
                const auto& o = member(c);
                if (!o) return std::nullopt;
                return fmt17(*o);
            },
            [member, key](RunConfig& c, const std::string& v) { member(c) = parse_double(v, key); }};
}

template <typename Get>
Entry int_entry(std::string key, Get member)
{
    return {key, [member](const RunConfig& c) -> std::optional<std::string> { return std::to_string(member(c)); },
            [member, key](RunConfig& c, const std::string& v) { member(c) = parse_small_int(v, key); }};
}

void add_field_entries(std::vector<Entry>& out, const std::string& name, FieldInit InitialConditionSpec::*field)
{
    const std::string p = "initial." + name + ".";
    auto f = [field](auto& c) -> auto& { return c.initial.*field; };
    out.push_back({p + "kind", [f](const RunConfig& c) -> std::optional<std::string> { return to_string(f(c).kind); },
                   [f](RunConfig& c, const std::string& v) { f(c).kind = init_kind_from_string(v); }});
    out.push_back(real_entry(p + "value", [f](auto& c) -> auto& { return f(c).value; }));
    out.push_back(real_entry(p + "amplitude", [f](auto& c) -> auto& { return f(c).amplitude; }));
    out.push_back(real_entry(p + "center.x", [f](auto& c) -> auto& { return f(c).center[0]; }));
    out.push_back(real_entry(p + "center.y", [f](auto& c) -> auto& { return f(c).center[1]; }));
    out.push_back(real_entry(p + "width", [f](auto& c) -> auto& { return f(c).width; }));
    out.push_back(int_entry(p + "modes", [f](auto& c) -> auto& { return f(c).modes; }));
    const std::string seed_key = p + "seed";
    out.push_back({seed_key, [f](const RunConfig& c) -> std::optional<std::string> { return std::to_string(f(c).seed); },
                   [f, seed_key](RunConfig& c, const std::string& v) { f(c).seed = parse_seed(v, seed_key); }});
}

const std::vector<Entry>& entries()
{
    static const std::vector<Entry> table = [] {
        std::vector<Entry> t;
        t.push_back(real_entry("model.beta", [](auto& c) -> auto& { return c.model.beta; }));
        t.push_back(real_entry("model.mu", [](auto& c) -> auto& { return c.model.mu; }));
        t.push_back({"model.f", [](const RunConfig& c) -> std::optional<std::string> { return to_string(c.model.f_kind); },
                     [](RunConfig& c, const std::string& v) { c.model.f_kind = kinetics_from_string(v); }});
        t.push_back(int_entry("model.n", [](auto& c) -> auto& { return c.model.n; }));
        t.push_back(real_entry("model.q", [](auto& c) -> auto& { return c.model.q; }));

        t.push_back(int_entry("grid.dim", [](auto& c) -> auto& { return c.grid.dim; }));
        t.push_back(real_entry("grid.length.x", [](auto& c) -> auto& { return c.grid.extents[0]; }));
        t.push_back(real_entry("grid.length.y", [](auto& c) -> auto& { return c.grid.extents[1]; }));
        t.push_back(int_entry("grid.cells.x", [](auto& c) -> auto& { return c.grid.cells[0]; }));
        t.push_back(int_entry("grid.cells.y", [](auto& c) -> auto& { return c.grid.cells[1]; }));

        t.push_back(real_entry("step.cfl_safety", [](auto& c) -> auto& { return c.step.cfl_safety; }));
        t.push_back(real_entry("step.t_end", [](auto& c) -> auto& { return c.step.t_end; }));
        t.push_back(real_entry("step.output_interval", [](auto& c) -> auto& { return c.step.output_interval; }));
        t.push_back(real_entry("step.blowup_threshold", [](auto& c) -> auto& { return c.step.blowup_threshold; }));
        t.push_back(real_entry("step.dt_floor", [](auto& c) -> auto& { return c.step.dt_floor; }));

        t.push_back(optional_entry("window.xi", [](auto& c) -> auto& { return c.xi; }));
        t.push_back(optional_entry("window.delta", [](auto& c) -> auto& { return c.delta; }));
        t.push_back(optional_entry("window.gamma", [](auto& c) -> auto& { return c.gamma; }));
        t.push_back(real_entry("window.gamma_fraction", [](auto& c) -> auto& { return c.gamma_fraction; }));

        t.push_back(real_entry("envelope.eta", [](auto& c) -> auto& { return c.eta; }));
        t.push_back(real_entry("envelope.tolerance", [](auto& c) -> auto& { return c.envelope_tolerance; }));
        for (int i = 0; i < 4; ++i) {
            const std::string key = "envelope.k" + std::to_string(i + 1);
            t.push_back({key,
                         [i](const RunConfig& c) -> std::optional<std::string> {
                             if (!c.k_hat) return std::nullopt;
                             return fmt17((*c.k_hat)[i]);
                         },
                         [i, key](RunConfig& c, const std::string& v) {
                             // Setting one K fixes the others at the neutral value 1 until set.
                             if (!c.k_hat) c.k_hat = std::array<double, 4>{1.0, 1.0, 1.0, 1.0};
                             (*c.k_hat)[i] = parse_double(v, key);
                         }});
        }
        t.push_back({"envelope.k_rigorous",
                     [](const RunConfig& c) -> std::optional<std::string> { return c.k_hat_rigorous ? "true" : "false"; },
                     [](RunConfig& c, const std::string& v) { c.k_hat_rigorous = parse_bool(v, "envelope.k_rigorous"); }});
        t.push_back(int_entry("semigroup.samples", [](auto& c) -> auto& { return c.semigroup_samples; }));

        t.push_back(optional_entry("functionals.p", [](auto& c) -> auto& { return c.tf_p; }));
        t.push_back(optional_entry("functionals.ell", [](auto& c) -> auto& { return c.tf_ell; }));
        t.push_back(optional_entry("functionals.w_star", [](auto& c) -> auto& { return c.tf_w_star; }));

        t.push_back(real_entry("initial.epsilon", [](auto& c) -> auto& { return c.initial.epsilon; }));
        add_field_entries(t, "u", &InitialConditionSpec::u);
        add_field_entries(t, "v", &InitialConditionSpec::v);
        add_field_entries(t, "w", &InitialConditionSpec::w);
        add_field_entries(t, "z", &InitialConditionSpec::z);

        t.push_back({"output.dir", [](const RunConfig& c) -> std::optional<std::string> { return c.output_dir; },
                     [](RunConfig& c, const std::string& v) {
                         if (v.empty()) throw InvalidArgument("output.dir must not be empty");
                         c.output_dir = v;
                     }});
        t.push_back({"output.snapshots",
                     [](const RunConfig& c) -> std::optional<std::string> { return c.snapshots ? "true" : "false"; },
                     [](RunConfig& c, const std::string& v) { c.snapshots = parse_bool(v, "output.snapshots"); }});
        t.push_back({"seed", [](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.seed); },
                     [](RunConfig& c, const std::string& v) { c.seed = parse_seed(v, "seed"); }});
        return t;
    }();
    return table;
}

const Entry* find_entry(const std::string& key)
{
    for (const auto& e : entries()) {
        if (e.key == key) return &e;
    }
    return nullptr;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

void set_config_value(RunConfig& c, const std::string& key, const std::string& value)
{
    const Entry* e = find_entry(key);
    if (!e) throw ConfigError("unknown key '" + key + "'");
    try {
        e->set(c, value);
    } catch (const InvalidArgument& err) {
        throw ConfigError(err.what());
    }
}

std::vector<std::string> config_keys()
{
    std::vector<std::string> keys;
    for (const auto& e : entries()) keys.push_back(e.key);
    return keys;
}

RunConfig parse_config(std::istream& is)
{
    RunConfig c;
    std::set<std::string> seen;
    std::string line;
    int number = 0;
    while (std::getline(is, line)) {
        ++number;
        const std::string body = trim(line);
        if (body.empty() || body[0] == '#') continue;
        const auto eq = body.find('=');
        const std::string where = "line " + std::to_string(number) + ": ";
        if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + "missing key");
        const Entry* e = find_entry(key);
        if (!e) throw ConfigError(where + "unknown key '" + key + "'");
        if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
        try {
            e->set(c, value);
        } catch (const InvalidArgument& err) {
            throw ConfigError(where + err.what());
        }
    }
    return c;
}

RunConfig parse_config_string(const std::string& text)
{
    std::istringstream is(text);
    return parse_config(is);
}

RunConfig load_config(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(is);
}

void print_config(std::ostream& os, const RunConfig& c)
{
    for (const auto& e : entries()) {
        if (auto v = e.get(c)) os << e.key << " = " << *v << '\n';
    }
}

std::string config_to_string(const RunConfig& c)
{
    std::ostringstream os;
    print_config(os, c);
    return os.str();
}

namespace {

std::vector<double> sample_profile(const FieldInit& f, double base, const BoxDomain& d)
{
    std::vector<double> out(d.size(), 0.0);
    const int nx = d.cells[0];
    const int ny = d.dim == 1 ? 1 : d.cells[1];
    switch (f.kind) {
    case InitKind::Constant:
        std::fill(out.begin(), out.end(), f.value);
        break;
    case InitKind::Bump: {
        if (!(f.width > 0.0)) throw InvalidArgument("bump width must be > 0");
        const double inv = 1.0 / (2.0 * f.width * f.width);
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const double dx = d.center(0, i) - f.center[0];
                double r2 = dx * dx;
                if (d.dim == 2) {
                    const double dy = d.center(1, j) - f.center[1];
                    r2 += dy * dy;
                }
                out[static_cast<std::size_t>(j) * nx + i] = base + f.amplitude * std::exp(-r2 * inv);
            }
        }
        break;
    }
    case InitKind::Noise: {
        if (f.modes < 1) throw InvalidArgument("noise needs at least one mode");
        const SpectralDomain sd(d);
        const Field g = band_limited_noise(sd, f.modes, f.seed, 0, false);
        const double scale = linf_norm(g.span());
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] = base + (scale > 0.0 ? f.amplitude * g.values[k] / scale : 0.0);
        }
        break;
    }
    }
    for (double& x : out) {
        if (!std::isfinite(x)) throw InvalidArgument("initial profile is not finite");
        x = std::max(x, 0.0);
    }
    return out;
}

}  // namespace

SimState build_initial_state(const InitialConditionSpec& ic, const BoxDomain& d, const ModelParams& p)
{
    d.validate();
    if (!(ic.epsilon >= 0.0) || !std::isfinite(ic.epsilon)) throw InvalidArgument("epsilon must be >= 0");
    SimState s;
    s.u = Field(sample_profile(ic.u, p.beta, d));
    s.v = Field(sample_profile(ic.v, 0.0, d));
    s.w = Field(sample_profile(ic.w, 0.0, d));
    s.z = Field(sample_profile(ic.z, 0.0, d));
    for (Field* f : {&s.v, &s.w, &s.z}) {
        for (double& x : f->values) x *= ic.epsilon;
    }
    return s;
}

void write_snapshot_csv(const std::string& path, const Field& f, const BoxDomain& d)
{
    std::ofstream os(path);
    if (!os) throw Error("cannot write snapshot '" + path + "'");
    const int nx = d.cells[0];
    const int ny = d.dim == 1 ? 1 : d.cells[1];
    os << (d.dim == 1 ? "x,value\n" : "x,y,value\n");
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            os << fmt17(d.center(0, i)) << ',';
            if (d.dim == 2) os << fmt17(d.center(1, j)) << ',';
            os << fmt17(f.values[static_cast<std::size_t>(j) * nx + i]) << '\n';
        }
    }
}

}  // namespace granuloma
