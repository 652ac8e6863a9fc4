// granuloma: simulate, constants, sweep and verify for the four-field
// granuloma chemotaxis model.
//
// Exit codes: 0 ok, 1 a check failed, 2 config or infrastructure error,
// 3 the run blew up.

#include "granuloma/config.hpp"
#include "granuloma/error.hpp"
#include "granuloma/format.hpp"
#include "granuloma/scenario.hpp"
#include "granuloma/verify.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using namespace granuloma;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kInfrastructure = 2;
constexpr int kBlowUp = 3;

// Relative output paths are placed under GRANULOMA_OUTPUT_ROOT when set.
std::string output_path(const std::string& dir)
{
    const char* root = std::getenv("GRANULOMA_OUTPUT_ROOT");
    if (!root || !*root || fs::path(dir).is_absolute()) return dir;
    return (fs::path(root) / dir).string();
}

RunConfig load_or_default(const std::string& path)
{
    return path.empty() ? RunConfig{} : load_config(path);
}

int cmd_simulate(const std::string& config_path, const std::string& out_override)
{
    const RunConfig c = load_or_default(config_path);
    const std::string dir = output_path(out_override.empty() ? c.output_dir : out_override);
    const SimulationOutput out = simulate(c, dir);
    std::cout << "termination: " << to_string(out.result.termination) << '\n';
    std::cout << "steps: " << out.result.dt.steps << ", dt in [" << fmt17(out.result.dt.dt_min) << ", "
              << fmt17(out.result.dt.dt_max) << "]\n";
    for (const auto& r : out.checks) {
        std::cout << r.name << ": " << (r.indeterminate ? "INDETERMINATE" : r.pass ? "PASS" : "FAIL") << " ("
                  << r.notes << ")\n";
    }
    std::cout << "output: " << dir << '\n';
    if (out.result.termination == Termination::BlowUp) {
        std::cerr << "blow-up: " << out.result.message << '\n';
        return kBlowUp;
    }
    if (out.result.termination == Termination::TimestepCollapse) {
        std::cerr << "timestep collapse: " << out.result.message << '\n';
        return kInfrastructure;
    }
    return kOk;
}

int cmd_constants(const std::string& config_path, int estimate_k)
{
    const RunConfig c = load_or_default(config_path);
    const auto report = constants_report(c, estimate_k > 0 ? std::optional<int>(estimate_k) : std::nullopt);
    std::size_t width = 0;
    for (const auto& [k, v] : report) width = std::max(width, k.size());
    for (const auto& [k, v] : report) std::cout << k << std::string(width - k.size(), ' ') << " = " << v << '\n';
    return kOk;
}

int cmd_sweep(const std::string& config_path, const std::string& axis, double from, double to, int points,
              bool bisect, const std::string& out_override)
{
    const RunConfig c = load_or_default(config_path);
    const std::string dir = output_path(out_override.empty() ? c.output_dir : out_override);
    fs::create_directories(dir);
    if (bisect) {
        const BisectResult b = bisect_epsilon(c, from, to);
        write_sweep_csv((fs::path(dir) / "bisect.csv").string(), "epsilon", b.probes);
        std::cout << "bracketed: " << (b.bracketed ? "yes" : "no") << '\n';
        std::cout << "passes at epsilon = " << fmt17(b.lo) << '\n';
        std::cout << "fails at epsilon  = " << fmt17(b.hi) << '\n';
        if (b.eps2) std::cout << "eps2 (theory)     = " << fmt17(*b.eps2) << '\n';
        return kOk;
    }
    const auto pts = sweep(c, axis, from, to, points, dir);
    write_sweep_csv((fs::path(dir) / "sweep.csv").string(), axis, pts);
    for (const auto& p : pts) {
        std::cout << axis << " = " << fmt17(p.value) << "  R0 = " << fmt17(p.r0) << "  "
                  << (p.error.empty() ? p.termination : "error: " + p.error);
        if (p.fit) std::cout << "  rate = " << fmt17(p.fit->rate);
        std::cout << "  decay " << (p.decay_pass ? "pass" : "fail") << '\n';
    }
    return kOk;
}

int cmd_verify(const std::string& config_path, const std::vector<int>& only, int reference_cells,
               const std::string& out_override)
{
    const RunConfig c = load_or_default(config_path);
    VerifyOptions opts;
    opts.seed = c.seed;
    opts.semigroup_samples = c.semigroup_samples;
    opts.output_dir = output_path(out_override.empty() ? (fs::path(c.output_dir) / "verify").string() : out_override);
    opts.only = only;
    opts.reference_cells = reference_cells;
    opts.log = &std::cerr;
    const VerifySummary s = run_verify(opts);
    for (const auto& r : s.criteria) std::cout << format_criterion(r) << '\n';
    return s.all_pass() ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Simulator and verification harness for the granuloma chemotaxis model"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;

    auto* sim = app.add_subcommand("simulate", "Run one configuration and write diagnostics");
    sim->add_option("-c,--config", config_path, "Config file (key = value)");
    sim->add_option("-o,--output", out_dir, "Output directory (overrides output.dir)");

    int estimate_k = 0;
    auto* con = app.add_subcommand("constants", "Print the resolved stability constants");
    con->add_option("-c,--config", config_path, "Config file");
    con->add_option("--estimate-k", estimate_k, "Re-estimate K1..K4 with this many samples");

    std::string axis = "mu";
    double from = 0.0, to = 0.0;
    int points = 1;
    bool bisect = false;
    auto* swp = app.add_subcommand("sweep", "Sweep one parameter or bisect over epsilon");
    swp->add_option("-c,--config", config_path, "Config file");
    swp->add_option("--axis", axis, "beta, mu, epsilon or any config key");
    swp->add_option("--from", from, "First value (or lower epsilon when bisecting)")->required();
    swp->add_option("--to", to, "Last value (or upper epsilon when bisecting)")->required();
    swp->add_option("--points", points, "Number of points")->check(CLI::PositiveNumber);
    swp->add_flag("--bisect-epsilon", bisect, "Bracket the empirical epsilon threshold");
    swp->add_option("-o,--output", out_dir, "Output directory");

    std::vector<int> only;
    int reference_cells = 2048;
    auto* ver = app.add_subcommand("verify", "Run the acceptance criteria");
    ver->add_option("-c,--config", config_path, "Config file (seed, output.dir, semigroup.samples)");
    ver->add_option("--only", only, "Criteria to run (1..9)")->delimiter(',');
    ver->add_option("--reference-cells", reference_cells, "Reference resolution for criterion 8");
    ver->add_option("-o,--output", out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInfrastructure;
    }

    try {
        if (*sim) return cmd_simulate(config_path, out_dir);
        if (*con) return cmd_constants(config_path, estimate_k);
        if (*swp) return cmd_sweep(config_path, axis, from, to, points, bisect, out_dir);
        if (*ver) return cmd_verify(config_path, only, reference_cells, out_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kInfrastructure;
    } catch (const BlowUpError& e) {
        std::cerr << "blow-up: " << e.what() << '\n';
        return kBlowUp;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInfrastructure;
    }
    return kOk;
}
