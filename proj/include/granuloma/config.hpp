/**
 * @file config.hpp
 * @brief Run configuration, initial-condition specs, and the flat
 *        "key = value" file format.
 *
 * Keys are dotted (model.beta, grid.cells.x, initial.v.kind, ...). Lines
 * starting with '#' and blank lines are ignored. print_config writes every
 * key with 17 significant digits, so parse_config(print_config(c)) == c.
 */
#pragma once

#include "granuloma/grid.hpp"
#include "granuloma/model.hpp"
#include "granuloma/stepper.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace granuloma {

enum class InitKind { Constant, Bump, Noise };

std::string to_string(InitKind k);
InitKind init_kind_from_string(const std::string& s);

/// One field's initial profile.
///   Constant: value everywhere.
///   Bump:     base + amplitude * exp(-|x - center|^2 / (2 width^2)).
///   Noise:    base + amplitude * g, g band-limited on the first `modes`
///             cosine modes and normalized to max |g| = 1.
/// base is the equilibrium value (beta for u, 0 otherwise). Negative values
/// are clipped to 0.
struct FieldInit {
    InitKind kind = InitKind::Constant;
    double value = 0.0;
    double amplitude = 0.0;
    std::array<double, 2> center{0.5, 0.5};
    double width = 0.1;
    int modes = 8;
    std::uint64_t seed = 1;

    bool operator==(const FieldInit&) const = default;
};

struct InitialConditionSpec {
    FieldInit u{InitKind::Constant, 2.0};
    FieldInit v{InitKind::Bump, 0.0, 1.0};
    FieldInit w{InitKind::Bump, 0.0, 1.0};
    FieldInit z{InitKind::Bump, 0.0, 1.0};
    double epsilon = 1e-3;  ///< scales v, w and z

    bool operator==(const InitialConditionSpec&) const = default;
};

struct RunConfig {
    ModelParams model;
    BoxDomain grid = BoxDomain::line(1.0, 256);
    StepConfig step;

    std::optional<double> xi, delta, gamma;
    double gamma_fraction = 0.9;

    double eta = 0.1;
    double envelope_tolerance = 1e-2;
    std::optional<std::array<double, 4>> k_hat;  ///< empirical estimates when unset
    bool k_hat_rigorous = false;
    int semigroup_samples = 8;

    std::optional<double> tf_p, tf_ell, tf_w_star;

    InitialConditionSpec initial;

    std::string output_dir = "out";
    bool snapshots = false;
    std::uint64_t seed = 20250101;

    bool operator==(const RunConfig&) const = default;
};

/// Throws ConfigError ("line N: ...") on malformed lines, unknown keys,
/// duplicate keys, or unparsable values.
RunConfig parse_config(std::istream& is);
RunConfig parse_config_string(const std::string& text);
RunConfig load_config(const std::string& path);

void print_config(std::ostream& os, const RunConfig& c);
std::string config_to_string(const RunConfig& c);

/// Sets one key from its textual value (same rules as the file format).
void set_config_value(RunConfig& c, const std::string& key, const std::string& value);

/// Every key print_config may emit, in output order.
std::vector<std::string> config_keys();

/// Cell-centered samples of the configured profiles, epsilon applied.
SimState build_initial_state(const InitialConditionSpec& ic, const BoxDomain& d,
                             const ModelParams& p);

/// Snapshot CSV: header "x,value" or "x,y,value", x fastest, 17 digits.
void write_snapshot_csv(const std::string& path, const Field& f, const BoxDomain& d);

}  // namespace granuloma
