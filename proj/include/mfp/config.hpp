#pragma once

// Run configuration: `[section]` headers followed by `key = value` lines,
// `#` starts a comment. Sections and keys:
//
//   [market]   kappa nu r dividend s_f omega                (all required)
//   [behavior] gamma alpha beta chi_mode value_fn           (required)
//              chi0                       (required when chi_mode = constant)
//   [run]      dt t_end X0 Y0 S0                            (required)
//              stride seed fundamental sigma precision      (optional)
//   [scheme]   scheme fp_tol fp_max_iter fp_damping         (optional)
//   [micro]    agents snapshot_every w_min w_max            (optional)
//
// Unknown sections or keys are rejected.

#include "mfp/core_model.hpp"
#include "mfp/macro_sim.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mfp {

enum class FundamentalMode { constant, gbm };

struct RunDescriptor {
    double X0 = 20.0;
    double Y0 = 20.0;
    double S0 = 5.0;
    std::size_t stride = 1;
    std::uint64_t seed = 767;
    FundamentalMode fundamental = FundamentalMode::constant;
    double sigma = 1.0;
    int precision = 12;

    std::size_t agents = 1000;
    std::size_t snapshot_every = 0;
    std::optional<double> w_min;
    std::optional<double> w_max;

    bool operator==(const RunDescriptor&) const = default;
};

struct Config {
    ModelParams params;
    SchemeConfig scheme;
    RunDescriptor run;
    std::vector<std::string> overrides; // "key=value" in the order applied

    void validate() const;
    bool operator==(const Config&) const = default;
};

/// Text of the shipped default configuration (standard parameter table).
std::string_view default_config_text();
Config default_config();

Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);

/// Applies one override; `key` is either `section.key` or a bare key.
/// Throws ValidationError for unknown keys or bad values. Records the
/// override in config.overrides.
void apply_override(Config& config, std::string_view key, std::string_view value);
/// Same, taking "key=value".
void apply_override(Config& config, std::string_view assignment);
/// Applies "key=value" assignments in order and validates once at the end,
/// so coupled keys (w_min, w_max) can be set together. Either every
/// assignment takes effect or the config is left untouched; the same holds
/// for the single-override forms.
void apply_overrides(Config& config, std::span<const std::string> assignments);

/// Canonical, re-parseable rendering of every key (doubles in round-trip
/// precision).
std::string echo(const Config& config);

/// Initial macro state and fundamental path described by the config.
MacroState initial_state(const Config& config);

} // namespace mfp
