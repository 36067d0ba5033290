#pragma once

// Run metadata written next to every output. Serialises to JSON and back
// without loss (doubles are emitted in round-trip precision).

#include "mfp/macro_sim.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mfp {

struct StatsSummary {
    double min_S = 0.0;
    double max_S = 0.0;
    double mean_S = 0.0;
    std::size_t window = 0;
    std::string range_class;
    std::optional<double> amplitude;
    std::optional<double> period;
    std::optional<double> center;
    std::optional<double> stock_excess_kurtosis;
    std::optional<double> fundamental_excess_kurtosis;

    bool operator==(const StatsSummary&) const = default;
};

struct RunReport {
    std::string command;
    std::string config_echo;
    std::string scheme;
    std::uint64_t seed = 0;
    std::string fundamental; // "constant" or "gbm"
    std::size_t steps = 0;
    std::size_t samples = 0;
    std::size_t stride = 1;
    double wall_time_s = 0.0;
    Sample terminal;
    StatsSummary stats;
    std::size_t fp_fallbacks = 0;
    double max_transfer_residual = 0.0;
    std::vector<std::string> warnings;
    std::vector<std::string> overrides;

    bool operator==(const RunReport&) const;
};

std::string to_json(const RunReport& report, int indent = 2);
RunReport report_from_json(const std::string& text);

} // namespace mfp
