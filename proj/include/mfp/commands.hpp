#pragma once

// The operations behind each CLI subcommand, returning structured results.

#include "mfp/config.hpp"
#include "mfp/io.hpp"
#include "mfp/micro_sim.hpp"
#include "mfp/mpc_verify.hpp"
#include "mfp/oracle.hpp"
#include "mfp/report.hpp"
#include "mfp/stats.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mfp {

FundamentalPath build_fundamental(const Config& config, std::size_t steps);

struct SimulationResult {
    Trajectory traj;
    RunReport report;
};

SimulationResult simulate(const Config& config);

StatsSummary summarize(const Trajectory& traj, double tail_fraction = default_tail_fraction);

/// "start:stop:step" (inclusive stop, values rounded to 12 significant
/// digits) or a comma-separated list.
std::vector<double> parse_grid(std::string_view spec);

struct SweepResult {
    std::string key;
    double tail_fraction = default_tail_fraction;
    std::vector<SweepCell> cells;
    double wall_time_s = 0.0;
};

/// One macro run per grid value, each with `key` overridden and seed
/// config.run.seed ^ index; cells run on up to `jobs` threads.
SweepResult run_sweep(const Config& config, const std::string& key, std::span<const double> values,
                      double tail_fraction = default_tail_fraction, unsigned jobs = 1);
std::string to_json(const SweepResult& sweep, int indent = 2);

struct OracleCheck {
    double chi = 1.0;
    double dt = 0.0;
    OracleReport coarse; // at dt
    OracleReport fine;   // at dt / 2
    double ratio = 0.0;  // coarse.worst() / fine.worst()
    bool passed = false;
};

struct VerifyResult {
    MpcVerification mpc;
    std::vector<OracleCheck> oracle;
    double threshold = 1e-3;
    double min_ratio = 1.8;
    bool passed() const;
};

/// MPC cross-check plus the closed-form comparison for identity U at
/// constant chi = 1 and 0.5 (and the configured chi when it is constant).
VerifyResult run_verify(const Config& config);
std::string to_json(const VerifyResult& v, int indent = 2);

struct MicroGap {
    std::size_t agents = 0;
    std::size_t steps = 0;
    double max_ed_gap = 0.0;     // max_t |ED_N - ED|
    double max_price_gap = 0.0;  // max_t |S_N - S| / S
    double max_wealth_gap = 0.0; // max_t max(|X_N - X|, |Y_N - Y|) / (|X| + |Y|)
};

struct MicroComparison {
    MicroRun micro;
    Trajectory macro;
    MicroGap gap;
};

MicroGap micro_gap(const Trajectory& micro, const Trajectory& macro);

/// Runs the agent system (homogeneous, or uniform wealth when w_min/w_max
/// are set) next to the macro model started from the population means.
MicroComparison run_micro_comparison(const Config& config, std::size_t agents,
                                     std::optional<std::size_t> max_steps = std::nullopt);
std::string to_json(const MicroGap& gap, int indent = 2);

/// Log-return moments of S and s_f, asymptotic range, oscillation metrics
/// and the equilibrium price for the configured parameters.
std::string stats_json(const Trajectory& traj, const Config& config, double tail_fraction = default_tail_fraction,
                       int indent = 2);
std::vector<QQPair> stock_qq(const Trajectory& traj, std::size_t count);

} // namespace mfp
